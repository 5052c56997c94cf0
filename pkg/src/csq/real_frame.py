"""Finite frames on the real line from real Hermite polynomials.

The frame vectors ``|x> = N_N(x)^{-1/2} sum_{n<=N} H_n(x)/sqrt(n! 2^n) e_n``
resolve the identity of an ``(N+1)``-dimensional real space against
``e^{-x^2} N_N(x) dx / sqrt(pi)``. Observables ``f`` are quantized by Gauss-
Hermite quadrature or, for Hermite expansions, by the closed matrix-element
formula; the two are checked against each other.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import numerics
from .errors import ConsistencyError, NumericalPreconditionError
from .poly import UnivariatePoly, hermite

# ---------------------------------------------------------------------------
# Hermite values
# ---------------------------------------------------------------------------


def hermite_values(n_max: int, x) -> np.ndarray:
    """``H_0..H_{n_max}`` at ``x`` (scalar or array) by the float recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 2 * x
    for n in range(1, n_max):
        out[n + 1] = 2 * x * out[n] - 2 * n * out[n - 1]
    return out


def normalized_hermite_values(N: int, x) -> np.ndarray:
    """``H_n(x)/sqrt(n! 2^n)`` for ``n = 0..N``."""
    h = hermite_values(N, x)
    scale = np.array([math.sqrt(math.factorial(n) * 2.0**n) for n in range(N + 1)])
    return h / scale.reshape((-1,) + (1,) * (h.ndim - 1))


# ---------------------------------------------------------------------------
# normalisation, frame states, overlap
# ---------------------------------------------------------------------------


def cd_sum(N: int, x) -> np.ndarray:
    """``sum_{n<=N} H_n(x)^2 / (n! 2^n)``."""
    return np.sum(normalized_hermite_values(N, x) ** 2, axis=0)


def cd_closed(N: int, x) -> np.ndarray:
    """``[H_{N+1}^2 - H_N H_{N+2}] / (N! 2^{N+1})``."""
    h = hermite_values(N + 2, x)
    return (h[N + 1] ** 2 - h[N] * h[N + 2]) / (math.factorial(N) * 2.0 ** (N + 1))


def cd_normalization(N: int, x, rtol: float = 1e-10) -> float:
    """Christoffel-Darboux normalisation ``N_N(x)``, sum and closed forms cross-checked."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    a, b = cd_sum(N, x), cd_closed(N, x)
    if not np.all(np.abs(a - b) <= rtol * np.abs(a)):
        raise ConsistencyError(f"Christoffel-Darboux sum/closed mismatch at N={N}")
    return b if np.ndim(b) else float(b)


def cd_normalization_exact(N: int, x: Fraction) -> Fraction:
    """Exact ``N_N(x)`` at a rational point."""
    return sum(
        (Fraction(hermite(n)(x)) ** 2 / (math.factorial(n) * 2**n) for n in range(N + 1)),
        Fraction(0),
    )


@dataclass(frozen=True)
class FrameState:
    x: float
    coeffs: np.ndarray


def frame_state(N: int, x: float) -> FrameState:
    v = normalized_hermite_values(N, float(x))
    return FrameState(float(x), v / math.sqrt(cd_normalization(N, float(x))))


def overlap(N: int, x: float, y: float) -> float:
    """``<x|y>``: Christoffel-Darboux quotient, or the sum form when ``x`` is near ``y``."""
    x, y = float(x), float(y)
    nx, ny = cd_normalization(N, x), cd_normalization(N, y)
    if abs(x - y) < 1e-6 * max(1.0, abs(x)):
        kern = float(np.dot(normalized_hermite_values(N, x), normalized_hermite_values(N, y)))
    else:
        h = hermite_values(N + 1, np.array([x, y]))
        kern = (h[N + 1, 0] * h[N, 1] - h[N, 0] * h[N + 1, 1]) / (
            math.factorial(N) * 2.0 ** (N + 1) * (x - y)
        )
    return kern / math.sqrt(nx * ny)


# ---------------------------------------------------------------------------
# quantization
# ---------------------------------------------------------------------------


@dataclass
class RealOperator:
    matrix: np.ndarray
    label: str
    source: str

    @property
    def N(self) -> int:
        return self.matrix.shape[0] - 1

    def to_dict(self) -> dict:
        m = np.asarray(self.matrix, dtype=float)
        return {"s": 0, "D": int(m.shape[0]), "label": self.label, "re": m.tolist(),
                "im": np.zeros_like(m).tolist()}


def _as_callable(f) -> Callable:
    if isinstance(f, UnivariatePoly):
        coeffs = f.float_coeffs()
        return lambda x: np.polyval(coeffs[::-1], x) if coeffs else np.zeros_like(x)
    return f


def hermite_rule(m: int) -> numerics.QuadratureRule:
    return numerics.gauss_rule("hermite", m)


def rule_for_degree(deg: int) -> numerics.QuadratureRule:
    """Smallest Gauss-Hermite rule integrating polynomials of degree ``deg`` exactly."""
    return hermite_rule(max(1, deg // 2 + 1))


def _quadrature_matrix(N: int, f, rule) -> np.ndarray:
    x = rule.nodes
    w = rule.weights / math.sqrt(math.pi)
    fx = np.asarray(_as_callable(f)(x), dtype=float) * np.ones_like(x)
    phi = normalized_hermite_values(N, x)  # (N+1, m)
    return (phi * (w * fx)) @ phi.T


def quantize_fn(N: int, f, rule: numerics.QuadratureRule | None = None, label: str = "f",
                conv_tol: float = 1e-9) -> RealOperator:
    """``A_f^{kl} = pi^{-1/2} int e^{-x^2} f H_k H_l / sqrt(k! l! 2^{k+l}) dx``.

    A :class:`UnivariatePoly` gets the smallest exact rule when ``rule`` is
    omitted. Any other callable is integrated at ``m`` and ``2m`` nodes and
    accepted once they agree to ``conv_tol``.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    if rule is not None:
        return RealOperator(_quadrature_matrix(N, f, rule), label, "quadrature")
    if isinstance(f, UnivariatePoly):
        r = rule_for_degree(2 * N + max(f.degree, 0))
        return RealOperator(_quadrature_matrix(N, f, r), label, "quadrature")
    m = N + 8
    prev = _quadrature_matrix(N, f, hermite_rule(m))
    while m <= 400:
        m *= 2
        cur = _quadrature_matrix(N, f, hermite_rule(m))
        if np.max(np.abs(cur - prev)) <= conv_tol * max(1.0, np.max(np.abs(cur))):
            return RealOperator(cur, label, "quadrature")
        prev = cur
    raise NumericalPreconditionError(f"quadrature for {label} did not converge under node doubling")


def quantize_hermite_series(N: int, a: Sequence, label: str = "f") -> RealOperator:
    """Matrix of ``f = sum a_n H_n`` from the closed element formula.

    ``A^{kl} = sum_r a_{k+l-2r} 2^{(k+l-2r)/2} (k+l-2r)! sqrt(k! l!) / ((k-r)! (l-r)! r!)``.
    Only ``a_0..a_{2N}`` can enter.
    """
    a = list(a)
    M = np.zeros((N + 1, N + 1))
    for k in range(N + 1):
        for l in range(N + 1):
            acc = 0.0
            for r in range(min(k, l) + 1):
                j = k + l - 2 * r
                if j >= len(a) or a[j] == 0:
                    continue
                acc += (
                    float(a[j])
                    * 2.0 ** (j / 2)
                    * math.factorial(j)
                    * math.sqrt(math.factorial(k) * math.factorial(l))
                    / (math.factorial(k - r) * math.factorial(l - r) * math.factorial(r))
                )
            M[k, l] = acc
    return RealOperator(M, label, "hermite_coeffs")


def monomial_to_hermite(r: int) -> list[Fraction]:
    """Coefficients ``a_j`` with ``x^r = sum_j a_j H_j``, exact."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    a = [Fraction(0)] * (r + 1)
    for k in range(r // 2 + 1):
        a[r - 2 * k] = Fraction(math.factorial(r), 2**r * math.factorial(k) * math.factorial(r - 2 * k))
    return a


def poly_to_hermite(p: UnivariatePoly) -> list[Fraction]:
    out = [Fraction(0)] * max(1, p.degree + 1)
    for r, c in enumerate(p.coeffs):
        for j, a in enumerate(monomial_to_hermite(r)):
            out[j] += c * a
    return out


def hermite_to_poly(a: Sequence) -> UnivariatePoly:
    acc = UnivariatePoly()
    for n, c in enumerate(a):
        if c:
            acc = acc + hermite(n) * Fraction(c)
    return acc


def position_matrix(N: int) -> np.ndarray:
    """Tridiagonal ``A_x`` with off-diagonal ``sqrt(k/2)``, ``k = 1..N``."""
    off = np.sqrt(np.arange(1, N + 1) / 2.0)
    return np.diag(off, 1) + np.diag(off, -1)


def position_spectrum(N: int) -> numerics.SpectrumResult:
    return numerics.symmetric_spectrum(position_matrix(N))


def hermite_roots(n: int, tol: float = 1e-14) -> np.ndarray:
    """Roots of ``H_n`` by sign-scan and bisection of the float recurrence."""
    if n == 0:
        return np.array([])
    bound = math.sqrt(2 * n + 1) + 1.0
    f = lambda x: float(hermite_values(n, x)[n])
    roots = []
    for a, b in numerics.bracket_roots(f, -bound, bound, samples=200 * n + 1):
        roots.append(a if a == b else numerics.find_root(f, (a, b), tol))
    return np.array(roots)


# ---------------------------------------------------------------------------
# lower symbols
# ---------------------------------------------------------------------------


def _cd_kernel(N: int, x, t: float) -> np.ndarray:
    """``sum_n H_n(x) H_n(t)/(n! 2^n)`` -- the polynomial form of the CD quotient."""
    return np.tensordot(normalized_hermite_values(N, t), normalized_hermite_values(N, x), axes=1)


def lower_symbol(N: int, f, t, rule: numerics.QuadratureRule | None = None,
                 conv_tol: float = 1e-9) -> np.ndarray | float:
    """``f_check(t) = pi^{-1/2} N_N(t)^{-1} int e^{-x^2} f(x) K_N(x, t)^2 dx``.

    ``K_N`` is the Christoffel-Darboux sum, so the squared quotient over
    ``(t - x)^2`` is never formed. Polynomial ``f`` of degree ``d`` is exact
    with ``N + d//2 + 1`` nodes; a user-supplied ``rule`` below that raises.
    Other callables use node doubling.
    """
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    need = None
    if isinstance(f, UnivariatePoly):
        need = 2 * N + max(f.degree, 0)
        if rule is None:
            rule = rule_for_degree(need)
        elif rule.exactness_degree < need:
            raise NumericalPreconditionError(
                f"rule exact to degree {rule.exactness_degree} < {need} needed for lower symbol"
            )

    def evaluate(r):
        fx = np.asarray(_as_callable(f)(r.nodes), dtype=float) * np.ones_like(r.nodes)
        w = r.weights / math.sqrt(math.pi)
        out = np.empty(len(ts))
        for i, tv in enumerate(ts):
            k = _cd_kernel(N, r.nodes, tv)
            out[i] = np.dot(w * fx, k * k) / cd_normalization(N, tv)
        return out

    if rule is not None:
        vals = evaluate(rule)
    else:
        m = N + 16
        vals = evaluate(hermite_rule(m))
        while True:
            m *= 2
            new = evaluate(hermite_rule(m))
            if np.max(np.abs(new - vals)) <= conv_tol * max(1.0, np.max(np.abs(new))):
                vals = new
                break
            if m > 400:
                raise NumericalPreconditionError("lower symbol did not converge under node doubling")
            vals = new
    return vals if np.ndim(t) else float(vals[0])


def lower_symbol_definitional(N: int, f, t: float) -> float:
    """``<t|A_f|t>`` by contracting the quantized matrix with the frame state."""
    v = frame_state(N, t).coeffs
    return float(v @ quantize_fn(N, f).matrix @ v)


def gaussian_moment(k: int) -> Fraction:
    """``pi^{-1/2} int e^{-x^2} x^k dx`` exactly."""
    if k % 2:
        return Fraction(0)
    double_fact = math.prod(range(k - 1, 0, -2)) if k else 1
    return Fraction(double_fact, 2 ** (k // 2))


def lower_symbol_exact(N: int, f: UnivariatePoly, t) -> Fraction:
    """Exact lower symbol of a polynomial observable at a rational ``t``."""
    t = Fraction(t)
    kern = UnivariatePoly()
    for n in range(N + 1):
        kern = kern + hermite(n) * (Fraction(hermite(n)(t)) / (math.factorial(n) * 2**n))
    integrand = f * kern * kern
    num = sum((c * gaussian_moment(k) for k, c in enumerate(integrand.coeffs)), Fraction(0))
    return num / cd_normalization_exact(N, t)


def faithful_sector(N: int, lo: float = -8.0, hi: float = 8.0, steps: int = 3201,
                    threshold: float = 0.5) -> tuple[float, float]:
    """Widest interval around 0 on which ``|x_check(t) - t| < threshold``.

    Near ``t = 0`` the slope of ``x_check`` oscillates with ``N`` (2 for
    ``N = 1``, nearly 0 for even ``N``), so very small thresholds pin the
    interval to the first grid cells for every ``N``.
    """
    ts = np.linspace(lo, hi, steps)
    dev = np.abs(lower_symbol(N, UnivariatePoly.x(), ts) - ts)
    mid = int(np.argmin(np.abs(ts)))
    i = j = mid
    while i > 0 and dev[i - 1] < threshold:
        i -= 1
    while j < steps - 1 and dev[j + 1] < threshold:
        j += 1
    return float(ts[i]), float(ts[j])


def diagonal_crossings(N: int, hi: float = 8.0, steps: int = 3201) -> np.ndarray:
    """Positive ``t`` where ``x_check(t) - t`` changes sign, refined by bisection."""
    x = UnivariatePoly.x()
    g = lambda t: float(lower_symbol(N, x, t)) - t
    ts = np.linspace(0.0, hi, steps)[1:]
    d = lower_symbol(N, x, ts) - ts
    out = []
    for k in range(len(ts) - 1):
        if d[k] * d[k + 1] < 0:
            out.append(numerics.find_root(g, (ts[k], ts[k + 1]), 1e-10))
    return np.array(out)


def lower_symbol_csv(ts, classical, check) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "classical", "check"])
    for a, b, c in zip(ts, classical, check):
        w.writerow([repr(float(a)), repr(float(b)), repr(float(c))])
    return buf.getvalue()


def resolution_check(N: int, rule: numerics.QuadratureRule | None = None) -> float:
    """Max deviation of the quadrature Gram matrix of ``H_n/sqrt(n! 2^n)`` from identity."""
    rule = rule or hermite_rule(N + 1)
    return float(np.max(np.abs(quantize_fn(N, lambda x: np.ones_like(x), rule).matrix - np.eye(N + 1))))
