"""Shared numerical kernels.

Gauss-Hermite and generalized Gauss-Laguerre rules by the Golub-Welsch
construction, dense and tridiagonal self-adjoint eigensolvers, a tolerance
controlled series accumulator, bisection, and the uniform-grid Hamiltonian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, NoSignChangeError

SERIES_TOL = 1e-14
TAIL_GUARD = 3
EIG_TOL = 1e-10
QUAD_TOL = 1e-12


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureRule:
    """Gaussian rule for ``e^{-x^2}`` on R or ``x^alpha e^{-x}`` on (0, inf).

    ``weights`` sum to the total mass ``mu0``; ``normalized_weights`` sum to 1
    and stay finite even when ``mu0 = Gamma(alpha+1)`` overflows.
    """

    kind: str
    alpha: float
    nodes: np.ndarray
    normalized_weights: np.ndarray
    log_mu0: float
    exactness_degree: int

    @property
    def weights(self) -> np.ndarray:
        return self.normalized_weights * math.exp(self.log_mu0)

    @property
    def size(self) -> int:
        return len(self.nodes)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))

    def moments_check(self, tol: float = QUAD_TOL) -> float:
        """Largest scaled monomial error over degrees 0..exactness_degree."""
        return _monomial_defect(self)


def _jacobi_matrix(kind: str, m: int, alpha: float = 0.0):
    k = np.arange(m, dtype=float)
    if kind == "hermite":
        diag = np.zeros(m)
        off = np.sqrt(k[1:] / 2.0)
    elif kind == "laguerre":
        diag = 2.0 * k + alpha + 1.0
        off = np.sqrt(k[1:] * (k[1:] + alpha))
    else:
        raise ValueError(f"unknown rule kind {kind!r}")
    return diag, off


def _orthonormal_values(diag, off, x):
    """Orthonormal (unit-mass) recurrence values q_0..q_{m-1} at ``x``; row m is unscaled."""
    m = len(diag)
    q = np.zeros((m + 1, len(x)))
    q[0] = 1.0
    prev = np.zeros_like(x)
    for k in range(m):
        nxt = (x - diag[k]) * q[k] - (off[k - 1] * prev if k else 0.0)
        if k < m - 1:
            nxt = nxt / off[k]
        prev = q[k]
        q[k + 1] = nxt
    return q


def _refine_nodes(diag, off, x, steps=2):
    # Newton on the monic degree-m polynomial, evaluated by its recurrence
    m = len(diag)
    for _ in range(steps):
        p_prev, p = np.zeros_like(x), np.ones_like(x)
        dp_prev, dp = np.zeros_like(x), np.zeros_like(x)
        for k in range(m):
            b2 = off[k - 1] ** 2 if k else 0.0
            p_new = (x - diag[k]) * p - b2 * p_prev
            dp_new = p + (x - diag[k]) * dp - b2 * dp_prev
            p_prev, p = p, p_new
            dp_prev, dp = dp, dp_new
        with np.errstate(divide="ignore", invalid="ignore"):
            dx = np.where(dp != 0, p / dp, 0.0)
        x = x - dx
    return x


def _log_mu0(kind, alpha):
    return 0.5 * math.log(math.pi) if kind == "hermite" else math.lgamma(alpha + 1.0)


def _log_moment(kind, alpha, k):
    """log of the k-th monomial moment divided by mu0, or None when it vanishes."""
    if kind == "hermite":
        if k % 2:
            return None
        return math.lgamma((k + 1) / 2.0) - 0.5 * math.log(math.pi)
    return math.lgamma(alpha + k + 1.0) - math.lgamma(alpha + 1.0)


def _monomial_defect(rule: QuadratureRule) -> float:
    x, w = rule.nodes, rule.normalized_weights
    scale = max(1.0, float(np.max(np.abs(x))))
    worst = 0.0
    for k in range(rule.exactness_degree + 1):
        xs = (x / scale) ** k
        approx = float(np.dot(w, xs))
        mass = float(np.dot(w, np.abs(xs)))
        lm = _log_moment(rule.kind, rule.alpha, k)
        exact = 0.0 if lm is None else math.exp(lm - k * math.log(scale))
        ref = max(mass, abs(exact))
        if ref == 0.0:
            continue
        worst = max(worst, abs(approx - exact) / ref)
    return worst


@lru_cache(maxsize=512)
def gauss_rule(kind: str, m: int, alpha: float = 0.0, tol: float = QUAD_TOL) -> QuadratureRule:
    """Gauss rule with ``m`` nodes via the Golub-Welsch eigenproblem.

    ``kind`` is ``"hermite"`` (weight ``e^{-x^2}``) or ``"laguerre"`` (weight
    ``x^alpha e^{-x}``). Nodes are the Jacobi-matrix eigenvalues, polished by
    Newton on the recurrence; weights are ``mu0 * v_0^2`` where the eigenvector
    ``v`` is rebuilt from the orthonormal recurrence for relative accuracy in
    the far tails. The monomial self-test runs on every construction.
    """
    if m < 1:
        raise ValueError("need at least one node")
    if kind == "laguerre" and alpha <= -1:
        raise ValueError("laguerre rule needs alpha > -1")
    diag, off = _jacobi_matrix(kind, m, alpha)
    spec = tridiagonal_spectrum(diag, off)
    x = _refine_nodes(diag, off, spec.eigenvalues.copy())
    if kind == "hermite":
        x = 0.5 * (x - x[::-1])  # exact symmetry
    q = _orthonormal_values(diag, off, x)[:m]
    w = 1.0 / np.sum(q * q, axis=0)
    rule = QuadratureRule(
        kind=kind,
        alpha=float(alpha),
        nodes=x,
        normalized_weights=w / w.sum(),
        log_mu0=_log_mu0(kind, alpha),
        exactness_degree=2 * m - 1,
    )
    defect = _monomial_defect(rule)
    if not defect <= tol:
        raise ConvergenceError(
            f"{kind} rule m={m} alpha={alpha}: monomial self-test defect {defect:.2e} > {tol:.0e}"
        )
    return rule


def jacobi_matrix(kind: str, m: int, alpha: float = 0.0) -> np.ndarray:
    """Dense symmetric Jacobi matrix used by :func:`gauss_rule`."""
    diag, off = _jacobi_matrix(kind, m, alpha)
    return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)


# ---------------------------------------------------------------------------
# eigensolvers
# ---------------------------------------------------------------------------


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None
    residual: float = 0.0
    extra: dict = field(default_factory=dict)


def _check_residual(A_apply, w, v, scale, tol):
    if v is None:
        return 0.0
    res = float(np.max(np.abs(A_apply(v) - v * w))) if len(w) else 0.0
    if res > tol * max(1.0, scale):
        raise ConvergenceError(f"eigen residual {res:.2e} exceeds {tol:.0e}")
    return res


def symmetric_spectrum(A, vectors: bool = True, tol: float = EIG_TOL) -> SpectrumResult:
    """Full ascending spectrum of a real symmetric or complex Hermitian matrix."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    if np.max(np.abs(A - A.conj().T), initial=0.0) > 1e-12 * max(1.0, scale):
        raise ValueError("matrix is not self-adjoint to 1e-12")
    if vectors:
        w, v = np.linalg.eigh(A)
    else:
        w, v = np.linalg.eigvalsh(A), None
    res = _check_residual(lambda u: A @ u, w, v, scale, tol)
    return SpectrumResult(eigenvalues=w, eigenvectors=v, residual=res)


def tridiagonal_spectrum(
    diag, off, vectors: bool = False, select: tuple[int, int] | None = None, tol: float = EIG_TOL
) -> SpectrumResult:
    """Spectrum of the symmetric tridiagonal matrix ``(diag, off)``.

    ``select=(lo, hi)`` restricts to ascending indices lo..hi inclusive.
    """
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    kw = {"select": "i", "select_range": select} if select is not None else {}
    if vectors:
        w, v = eigh_tridiagonal(diag, off, **kw)
    else:
        w, v = eigh_tridiagonal(diag, off, eigvals_only=True, **kw), None

    def apply(u):
        out = diag[:, None] * u
        out[:-1] += off[:, None] * u[1:]
        out[1:] += off[:, None] * u[:-1]
        return out

    scale = float(max(np.max(np.abs(diag), initial=0.0), np.max(np.abs(off), initial=0.0)))
    res = _check_residual(apply, w, v, scale, tol)
    return SpectrumResult(eigenvalues=np.asarray(w), eigenvectors=v, residual=res)


# ---------------------------------------------------------------------------
# series and roots
# ---------------------------------------------------------------------------


@dataclass
class SeriesAccumulator:
    """Running sum that stops after ``tail_guard`` consecutive negligible terms."""

    tol: float = SERIES_TOL
    max_terms: int = 100_000
    tail_guard: int = TAIL_GUARD
    total: float = 0.0
    count: int = 0
    _quiet: int = 0
    _comp: float = 0.0

    def add(self, term) -> bool:
        """Add ``term``; return True once the sum has converged."""
        # Neumaier compensated summation
        t = self.total + term
        if abs(self.total) >= abs(term):
            self._comp += (self.total - t) + term
        else:
            self._comp += (term - t) + self.total
        self.total = t
        self.count += 1
        if abs(term) <= self.tol * abs(self.total + self._comp):
            self._quiet += 1
        else:
            self._quiet = 0
        return self._quiet >= self.tail_guard

    def sum(self, terms: Iterable) -> float:
        for t in terms:
            if self.add(t):
                return self.total + self._comp
            if self.count >= self.max_terms:
                break
        raise ConvergenceError(
            f"series did not converge within {self.max_terms} terms (last |term|={abs(t):.3e})"
        )


def sum_series(terms: Iterable, tol: float = SERIES_TOL, max_terms: int = 100_000,
               tail_guard: int = TAIL_GUARD) -> float:
    return SeriesAccumulator(tol=tol, max_terms=max_terms, tail_guard=tail_guard).sum(terms)


def find_root(f: Callable[[float], float], bracket: tuple[float, float], tol: float = 1e-12,
              max_iter: int = 200) -> float:
    """Bisection on ``[a, b]``; ``f(a)`` and ``f(b)`` must differ in sign."""
    a, b = map(float, bracket)
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if not (fa * fb < 0):
        raise NoSignChangeError(f"no sign change on [{a}, {b}]: f(a)={fa:.3e}, f(b)={fb:.3e}")
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        if b - a <= tol:
            return mid
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (fa < 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def bracket_roots(f: Callable, lo: float, hi: float, samples: int = 4001):
    """Sub-intervals of ``[lo, hi]`` on which ``f`` changes sign."""
    xs = np.linspace(lo, hi, samples)
    vals = np.array([f(x) for x in xs])
    out = []
    for i in range(samples - 1):
        if vals[i] == 0:
            out.append((xs[i], xs[i]))
        elif vals[i] * vals[i + 1] < 0:
            out.append((xs[i], xs[i + 1]))
    return out


# ---------------------------------------------------------------------------
# grid Hamiltonian
# ---------------------------------------------------------------------------


def uniform_grid(L: float, h: float) -> np.ndarray:
    n = int(round(2 * L / h))
    return np.linspace(-L, L, n + 1)


def grid_hamiltonian(potential: np.ndarray, h: float):
    """``-(1/2) d^2/dx^2 + V`` by central second differences with Dirichlet ends.

    Returns the tridiagonal ``(diag, off)`` pair on the interior points.
    """
    V = np.asarray(potential, dtype=float)
    diag = 1.0 / h**2 + V
    off = np.full(len(V) - 1, -0.5 / h**2)
    return diag, off
