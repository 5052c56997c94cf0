"""Supersymmetric partners of the harmonic oscillator on a uniform grid.

A nodeless solution ``u_eps`` of ``-u''/2 + x^2 u/2 = eps u`` (``eps < 1/2``,
``|mu| < 1``) factorises ``H - eps = A^+ A`` with
``A = (-d/dx + u'/u)/sqrt(2)``. Reversing the factors gives the partner
``H_eps = H - (ln u)''`` whose spectrum is ``{eps, 1/2, 3/2, ...}``. The
partner is diagonalised by second-order finite differences and compared with
the shifted ansatz Hamiltonian of the complex Hermite quantization.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .complex_cs import SectorConfig, ansatz_levels, hamiltonians, interior_spectrum
from scipy.integrate import trapezoid

from .errors import ConvergenceError, NumericalPreconditionError

L_MAX = 14.0
SERIES_TOL = 1e-16


class NodeError(NumericalPreconditionError):
    """The seed solution changes sign on the grid."""


def hyp1f1_scaled(a: float, b: float, y, shift=None, tol: float = SERIES_TOL, max_terms: int = 20_000):
    """``e^{-shift} 1F1(a; b; y)`` for ``a, b > 0`` and ``y >= 0`` (``shift`` defaults to ``y/2``).

    The series has positive terms here, so it is summed directly with
    compensation; the terms follow the ratio recurrence starting from
    ``e^{-shift}``, which keeps ``y`` in the hundreds finite. Summation stops
    once the term ratio is below 1/2 and the current term is below ``tol`` of
    the running sum everywhere.
    """
    if a <= 0 or b <= 0:
        raise ValueError("hyp1f1_scaled needs a > 0 and b > 0")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y < 0):
        raise ValueError("y must be nonnegative")
    shift = y / 2 if shift is None else np.broadcast_to(np.asarray(shift, dtype=float), y.shape)
    if np.any(shift > 700):
        raise ValueError("scaling shift beyond 700 would underflow the leading term")
    term = np.exp(-shift)
    total = term.copy()
    comp = np.zeros_like(total)
    for k in range(max_terms):
        term = term * ((a + k) * y / ((b + k) * (k + 1)))
        t = total + term
        comp += np.where(np.abs(total) >= np.abs(term), (total - t) + term, (term - t) + total)
        total = t
        ratio = (a + k + 1) * y / ((b + k + 1) * (k + 2))
        if np.all((ratio < 0.5) & (term <= tol * total)):
            return total + comp
    raise ConvergenceError("1F1 series did not converge")


def gamma_ratio(eps: float) -> float:
    """``Gamma(3/4 - eps/2) / Gamma(1/4 - eps/2)`` for ``eps < 1/2`` (both arguments positive)."""
    a = 0.25 - eps / 2
    if a <= 0:
        raise ValueError("Gamma ratio needs eps < 1/2")
    return math.exp(math.lgamma(a + 0.5) - math.lgamma(a))


def seed_values(eps: float, mu: float, x):
    """``u_eps(x)`` and ``u_eps'(x)`` (with the ``e^{-x^2/2}`` prefactor) on ``x``."""
    x = np.asarray(x, dtype=float)
    y = x * x
    a = 0.25 - eps / 2
    c = 2 * mu * gamma_ratio(eps)

    def F(al, be):
        return hyp1f1_scaled(al, be, y)

    def dF(al, be):
        # d/dx e^{-x^2/2} M(al, be, x^2)
        return -x * F(al, be) + 2 * x * (al / be) * F(al + 1, be + 1)

    F2 = F(a + 0.5, 1.5)
    u = F(a, 0.5) + c * x * F2
    du = dF(a, 0.5) + c * (F2 + x * dF(a + 0.5, 1.5))
    return u, du


@dataclass
class SeedSolution:
    epsilon: float
    mu: float
    L: float
    h: float
    grid: np.ndarray
    values: np.ndarray
    logderiv: np.ndarray

    @property
    def potential(self) -> np.ndarray:
        """``V_eps = x^2/2 - (ln u)''`` using ``(ln u)'' = x^2 - 2 eps - (u'/u)^2``."""
        x, w = self.grid, self.logderiv
        return -0.5 * x * x + 2 * self.epsilon + w * w

    def ode_residual(self) -> float:
        """Max of ``|-u''/2 + x^2 u/2 - eps u|`` over the size of its terms (FD ``u''``)."""
        u, x, h = self.values, self.grid, self.h
        upp = (u[2:] - 2 * u[1:-1] + u[:-2]) / h**2
        xi, ui = x[1:-1], u[1:-1]
        res = -0.5 * upp + 0.5 * xi * xi * ui - self.epsilon * ui
        scale = 0.5 * np.abs(upp) + 0.5 * xi * xi * np.abs(ui) + abs(self.epsilon) * np.abs(ui)
        return float(np.max(np.abs(res) / scale))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "u", "V"])
        for x, u, v in zip(self.grid, self.values, self.potential):
            w.writerow([repr(float(x)), repr(float(u)), repr(float(v))])
        return buf.getvalue()


def seed_solution(epsilon: float, mu: float = 0.0, L: float = 12.0, h: float = 0.01,
                  strict: bool = True) -> SeedSolution:
    """Tabulate ``u_eps`` on ``[-L, L]`` with step ``h`` and verify it is nodeless.

    ``strict=False`` skips the parameter preconditions (only useful to watch the
    node detection fire for ``|mu| >= 1``).
    """
    if strict:
        if not epsilon < 0.5:
            raise ValueError("epsilon must be < 1/2")
        if not abs(mu) < 1:
            raise ValueError("|mu| must be < 1")
    if not 0 < L <= L_MAX:
        raise ValueError(f"L must lie in (0, {L_MAX}]")
    if not 0 < h < L:
        raise ValueError("grid step must be positive and below L")
    x = numerics.uniform_grid(L, h)
    u, du = seed_values(epsilon, mu, x)
    bad = np.nonzero(u <= 0)[0]
    if len(bad):
        raise NodeError(f"u_eps changes sign near x = {x[bad[0]]:.4f} (eps={epsilon}, mu={mu})")
    return SeedSolution(epsilon, mu, L, h, x, u, du / u)


# ---------------------------------------------------------------------------
# factorisation
# ---------------------------------------------------------------------------


def hermite_function(n: int, x) -> np.ndarray:
    """Normalised oscillator eigenfunction ``psi_n``."""
    from .real_frame import normalized_hermite_values

    return normalized_hermite_values(n, x)[n] * np.exp(-np.asarray(x) ** 2 / 2) / math.pi**0.25


def _d(f, h):
    out = np.full_like(f, np.nan)
    out[1:-1] = (f[2:] - f[:-2]) / (2 * h)
    return out


def apply_A(seed: SeedSolution, f: np.ndarray) -> np.ndarray:
    return (-_d(f, seed.h) + seed.logderiv * f) / math.sqrt(2)


def apply_A_plus(seed: SeedSolution, f: np.ndarray) -> np.ndarray:
    return (_d(f, seed.h) + seed.logderiv * f) / math.sqrt(2)


def factorization_report(seed: SeedSolution, n_tests: int = 4) -> dict:
    """Finite-difference check of ``A^+ A = H - eps`` and ``A u = 0``.

    ``A^+ A psi_n`` is compared with ``(n + 1/2 - eps) psi_n`` for the first
    ``n_tests`` oscillator states; each residual is scaled by ``max |psi_n|``.
    ``A u`` is scaled pointwise by ``|u| (1 + |u'/u|)``. All are ``O(h^2)``.
    """
    x = seed.grid
    inner = slice(2, -2)
    out = {}
    for n in range(n_tests):
        psi = hermite_function(n, x)
        lhs = apply_A_plus(seed, apply_A(seed, psi))
        rhs = (n + 0.5 - seed.epsilon) * psi
        out[f"psi_{n}"] = float(np.max(np.abs(lhs[inner] - rhs[inner])) / np.max(np.abs(psi)))
    au = apply_A(seed, seed.values)
    scale = np.abs(seed.values) * (1 + np.abs(seed.logderiv))
    out["u"] = float(np.max(np.abs(au[1:-1]) / scale[1:-1]))
    out["max"] = max(out.values())
    return out


def factorization_residual(seed: SeedSolution, n_tests: int = 4) -> float:
    """Largest scaled residual of :func:`factorization_report`."""
    return factorization_report(seed, n_tests)["max"]


# ---------------------------------------------------------------------------
# partner spectrum
# ---------------------------------------------------------------------------


@dataclass
class PartnerHamiltonian:
    seed: SeedSolution
    potential: np.ndarray
    diag: np.ndarray
    off: np.ndarray
    spectrum: numerics.SpectrumResult
    extra: dict = field(default_factory=dict)

    @property
    def levels(self) -> np.ndarray:
        return self.spectrum.eigenvalues

    def expected_levels(self) -> np.ndarray:
        k = len(self.levels)
        return np.concatenate([[self.seed.epsilon], np.arange(k - 1) + 0.5])

    def eigenfunction(self, k: int) -> np.ndarray:
        """Grid eigenfunction ``k`` on the full grid (zero at the ends), ``sum v^2 h = 1``."""
        v = np.zeros(len(self.seed.grid))
        v[1:-1] = self.spectrum.eigenvectors[:, k] / math.sqrt(self.seed.h)
        return v


def partner_spectrum(seed: SeedSolution, k: int = 7, decay_tol: float = 1e-8) -> PartnerHamiltonian:
    """Lowest ``k+1`` levels of ``H_eps`` by central differences (Dirichlet at ``+-L``)."""
    V = seed.potential
    diag, off = numerics.grid_hamiltonian(V[1:-1], seed.h)
    spec = numerics.tridiagonal_spectrum(diag, off, vectors=True, select=(0, k))
    vecs = spec.eigenvectors
    edge = np.maximum(np.abs(vecs[0]), np.abs(vecs[-1])) / np.max(np.abs(vecs), axis=0)
    if np.any(edge > decay_tol):
        worst = int(np.argmax(edge))
        raise NumericalPreconditionError(
            f"partner level {worst} not decayed at +-L={seed.L} ({edge[worst]:.1e} > {decay_tol:.0e}); enlarge L"
        )
    return PartnerHamiltonian(seed, V, diag, off, spec, {"edge_decay": edge.tolist()})


def _aligned_distance(v: np.ndarray, g: np.ndarray, h: float) -> float:
    if np.dot(v, g) < 0:
        v = -v
    return float(math.sqrt(np.sum((v - g) ** 2) * h))


def ground_state_distance(partner: PartnerHamiltonian) -> float:
    """L2 distance between grid level 0 and ``(1/u)/||1/u||``."""
    seed = partner.seed
    g = 1.0 / seed.values
    g[0] = g[-1] = 0.0
    g /= math.sqrt(np.sum(g * g) * seed.h)
    return _aligned_distance(partner.eigenfunction(0), g, seed.h)


def excited_state_distances(partner: PartnerHamiltonian, count: int = 3) -> dict:
    """Compare level ``n`` with ``A psi_{n-1}``; also report ``||A psi_{n-1}||^2`` vs ``n-1/2-eps``."""
    seed = partner.seed
    out = {}
    for n in range(1, count + 1):
        g = apply_A(seed, hermite_function(n - 1, seed.grid))
        g[0] = g[-1] = 0.0
        norm_sq = float(np.sum(g * g) * seed.h)
        g /= math.sqrt(norm_sq)
        out[n] = {
            "distance": _aligned_distance(partner.eigenfunction(n), g, seed.h),
            "norm_sq": norm_sq,
            "norm_sq_expected": n - 0.5 - seed.epsilon,
        }
    return out


def inverse_seed_tail(eps: float, mu: float = 0.0, L: float = 12.0, extent: float = 8.0,
                      points: int = 4001) -> float:
    """``int_{|x|>L} u^{-2} dx`` relative to ``int u^{-2} dx`` (trapezoid, out to ``L+extent``)."""
    x = np.linspace(-(L + extent), L + extent, 2 * points + 1)
    u, _ = seed_values(eps, mu, x)
    g = 1.0 / u**2
    total = trapezoid(g, x)
    outside = np.abs(x) >= L
    tail = trapezoid(np.where(outside, g, 0.0), x)
    return float(tail / total)


# ---------------------------------------------------------------------------
# identification with the ansatz Hamiltonian
# ---------------------------------------------------------------------------


def identify_with_H_ansatz(s: int, levels: int = 8, L: float = 12.0, h: float = 0.01,
                           mu: float = 0.0, tol: float = 5e-3) -> dict:
    """Level-by-level comparison of ``H_ansatz(s) - s - 1`` with ``H_eps``, ``eps = -(s+1)/2``.

    Also checks ``H_cs(s) - 2s - 1/2`` against the oscillator levels. Level
    multiplicities are compared through the sorted spectra (all simple). No
    intertwining isometry is constructed.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    D = levels + 5  # guard band: compared levels satisfy n <= D - 5
    h_cs, h_ans = hamiltonians(SectorConfig(s, D))
    ans = interior_spectrum(h_ans)[:levels] - (s + 1)
    exact = ansatz_levels(s, levels) - (s + 1)
    cs = interior_spectrum(h_cs)[:levels] - 2 * s - 0.5
    eps = -(s + 1) / 2
    partner = partner_spectrum(seed_solution(eps, mu, L, h), k=levels - 1)
    grid_levels = partner.levels
    osc = np.arange(levels) + 0.5
    diff = float(np.max(np.abs(grid_levels - ans)))
    gaps = np.diff(ans)
    return {
        "s": s,
        "epsilon": eps,
        "levels": grid_levels.tolist(),
        "expected": ans.tolist(),
        "max_abs_diff": diff,
        "tolerance": tol,
        "match": diff <= tol,
        "ansatz_vs_exact": float(np.max(np.abs(ans - exact))),
        "dimension": D,
        "ansatz_gaps": gaps.tolist(),
        "h_cs_shifted": cs.tolist(),
        "h_cs_vs_oscillator": float(np.max(np.abs(cs - osc))),
        "ground_state_distance": ground_state_distance(partner),
        "isometry": "not constructed; spectra and eigenfunction correspondences only",
    }


def spectrum_report_json(report: dict) -> str:
    keys = ("epsilon", "levels", "expected")
    body = {k: report[k] for k in keys}
    body.update({k: v for k, v in report.items() if k not in keys})
    return json.dumps(body)
