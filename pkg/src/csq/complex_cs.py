"""Coherent states built on complex Hermite polynomials and their quantization.

For a sector ``s`` the states ``|z;s>`` live in a space with orthonormal basis
``|n;s>``; everything here works with the first ``D`` basis vectors.
Operators come in two flavours that are checked against each other:

* closed forms (superdiagonal ``A_z``, tridiagonal ``q``, ``p``, diagonal
  Hamiltonians), and
* :func:`quantize`, which evaluates the frame-quantization integral after the
  angular selection rule reduces it to a radial Gauss-Laguerre integral.

:func:`quantize_polar` is a third, deliberately naive route (full polar
tensor quadrature of the Gaussian-weighted basis functions) used as an oracle.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

import numpy as np

from . import numerics
from .errors import ConsistencyError, TruncationError
from .poly import BivariatePoly, complex_hermite, hyp1f1_poly, phi

DEFAULT_D = 40
SERIES_TOL = numerics.SERIES_TOL
MAX_DIMENSION = 20_000


@dataclass(frozen=True)
class SectorConfig:
    s: int = 0
    D: int = DEFAULT_D
    series_tol: float = SERIES_TOL

    def __post_init__(self):
        if self.s < 0 or int(self.s) != self.s:
            raise ValueError("sector s must be a nonnegative integer")
        if self.D < 2:
            raise ValueError("truncation D must be at least 2")


@dataclass
class TruncatedOperator:
    matrix: np.ndarray
    sector: int
    label: str

    @property
    def D(self) -> int:
        return self.matrix.shape[0]

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        m = self.matrix
        return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)

    def to_dict(self) -> dict:
        m = np.asarray(self.matrix, dtype=complex)
        return {
            "s": int(self.sector),
            "D": int(self.D),
            "label": self.label,
            "re": m.real.tolist(),
            "im": m.imag.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "TruncatedOperator":
        m = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        if m.shape != (data["D"], data["D"]):
            raise ValueError("matrix shape does not match D")
        return cls(matrix=m, sector=int(data["s"]), label=data["label"])


@dataclass
class CoherentState:
    z: complex
    sector: int
    coeffs: np.ndarray
    norm_value: float
    tail: float

    @property
    def D(self) -> int:
        return len(self.coeffs)


# ---------------------------------------------------------------------------
# scalar building blocks
# ---------------------------------------------------------------------------


def laguerre_values(s: int, n_max: int, lam: float) -> np.ndarray:
    """``L_s^{(n)}(lam)`` for ``n = 0..n_max`` in floating point."""
    n = np.arange(n_max + 1, dtype=float)
    out = np.zeros(n_max + 1)
    # sum_k (-1)^k C(s+n, s-k) lam^k / k!
    for k in range(s + 1):
        binom = np.ones_like(n)
        for j in range(s - k):
            binom *= (n + k + 1 + j) / (j + 1)
        out += (-1) ** k * binom * lam**k / math.factorial(k)
    return out


def _log_weights(s: int, n_max: int, lam: float) -> np.ndarray:
    """``log(s!/(s+n)! * lam^n)``; ``-inf`` where ``lam = 0`` and ``n > 0``."""
    n = np.arange(n_max + 1)
    lg = np.array([math.lgamma(s + k + 1) for k in n]) - math.lgamma(s + 1)
    if lam == 0:
        out = np.full(n_max + 1, -np.inf)
        out[0] = 0.0
        return out
    return n * math.log(lam) - lg


def normalization_terms(s: int, lam: float, n_max: int) -> np.ndarray:
    """Terms ``s!/(s+n)! lam^n (L_s^{(n)}(lam))^2`` for ``n = 0..n_max``."""
    if lam < 0:
        raise ValueError("lambda = |z|^2 must be nonnegative")
    return np.exp(_log_weights(s, n_max, lam)) * laguerre_values(s, n_max, lam) ** 2


def _terms_until_converged(s: int, lam: float, tol: float, cap: int = MAX_DIMENSION):
    """Normalization terms, extended until the tail is below ``tol`` of the sum."""
    n_max = max(32, int(2 * lam + 8 * math.sqrt(lam + 1) + s + 16))
    while True:
        t = normalization_terms(s, lam, n_max)
        acc = numerics.SeriesAccumulator(tol=tol, max_terms=len(t))
        for n, term in enumerate(t):
            if acc.add(term) and n > lam + s:
                return t[: n + 1]
        if n_max >= cap:
            raise TruncationError(f"normalization series for s={s}, lambda={lam} exceeds {cap} terms")
        n_max = min(2 * n_max, cap)


def normalization(s: int, lam: float, tol: float = SERIES_TOL) -> float:
    """``N_s(lam) = sum_n s!/(s+n)! lam^n (L_s^{(n)}(lam))^2``."""
    t = _terms_until_converged(s, lam, tol)
    return math.fsum(t)


def required_dimension(s: int, lam: float, tol: float = SERIES_TOL) -> int:
    """Smallest ``D`` whose coherent-state coefficient tail is below ``tol``."""
    t = _terms_until_converged(s, lam, tol * 1e-2)
    total = math.fsum(t)
    suffix = np.cumsum(t[::-1])[::-1] / total  # suffix[D] = tail beyond D-1
    for D in range(1, len(t)):
        if suffix[D] < tol:
            return D
    return len(t)


def coherent_coefficients(s: int, z: complex, n_terms: int) -> np.ndarray:
    """Unnormalised ``conj(h^{s+n,s}(z)) / sqrt(s!(s+n)!)`` for ``n < n_terms``."""
    z = complex(z)
    lam = abs(z) ** 2
    logw = _log_weights(s, n_terms - 1, lam)
    mag = np.exp(0.5 * logw)
    phase = np.exp(1j * cmath.phase(z) * np.arange(n_terms)) if lam else np.ones(n_terms)
    return (-1) ** s * mag * phase * laguerre_values(s, n_terms - 1, lam)


def coherent_state(s: int, z: complex, D: int = DEFAULT_D, tol: float = SERIES_TOL) -> CoherentState:
    """``|z;s>`` truncated to ``D`` components.

    The tail mass beyond ``D`` is measured from the full normalization series;
    a tail above ``tol`` raises :class:`TruncationError` naming the dimension
    that would be needed.
    """
    z = complex(z)
    lam = abs(z) ** 2
    t = _terms_until_converged(s, lam, tol * 1e-2)
    total = math.fsum(t)
    tail = math.fsum(t[D:]) / total if D < len(t) else 0.0
    if tail >= tol:
        need = required_dimension(s, lam, tol)
        raise TruncationError(
            f"|z;{s}> at |z|^2={lam:g}: tail {tail:.2e} beyond D={D} exceeds {tol:.0e}; need D >= {need}"
        )
    coeffs = coherent_coefficients(s, z, D) / math.sqrt(total)
    return CoherentState(z=z, sector=s, coeffs=coeffs, norm_value=total, tail=tail)


# ---------------------------------------------------------------------------
# closed-form operators
# ---------------------------------------------------------------------------


def ladder_operators(cfg: SectorConfig) -> tuple[TruncatedOperator, TruncatedOperator]:
    """``A_z = sum sqrt(s+n+1) |n;s><n+1;s|`` and its adjoint ``A_zbar``."""
    n = np.arange(cfg.D - 1)
    a = np.diag(np.sqrt(cfg.s + n + 1.0), 1).astype(complex)
    return (
        TruncatedOperator(a, cfg.s, "A_z"),
        TruncatedOperator(a.conj().T.copy(), cfg.s, "A_zbar"),
    )


def position_momentum(cfg: SectorConfig) -> tuple[TruncatedOperator, TruncatedOperator]:
    a, ad = ladder_operators(cfg)
    q = (a.matrix + ad.matrix) / math.sqrt(2)
    p = -1j * (a.matrix - ad.matrix) / math.sqrt(2)
    return TruncatedOperator(q, cfg.s, "q"), TruncatedOperator(p, cfg.s, "p")


def hamiltonians(cfg: SectorConfig) -> tuple[TruncatedOperator, TruncatedOperator]:
    """Quantized ``|z|^2`` (diagonal ``n+2s+1``) and the ansatz ``(q^2 + p^2)/2``.

    The ansatz matrix is formed from the truncated ``q`` and ``p``; its last
    diagonal entry is ``(s+D-1)/2`` instead of ``D-1+s+1/2`` (truncation edge).
    """
    n = np.arange(cfg.D)
    h_cs = np.diag(n + 2.0 * cfg.s + 1.0).astype(complex)
    q, p = position_momentum(cfg)
    h_ans = 0.5 * (q.matrix @ q.matrix + p.matrix @ p.matrix)
    h_ans = 0.5 * (h_ans + h_ans.conj().T)
    return TruncatedOperator(h_cs, cfg.s, "H_cs"), TruncatedOperator(h_ans, cfg.s, "H_ansatz")


def interior_spectrum(op: TruncatedOperator, guard: int = 5, tol: float = numerics.EIG_TOL) -> np.ndarray:
    """Eigenvalues of the interior block ``0..D-2`` with indices ``n <= D - guard``.

    For operators built from truncated ladder products the interior block is
    exactly the compression of the untruncated operator; the corner entry is
    the only edge artefact and would otherwise sort into the middle of the
    spectrum.
    """
    D = op.D
    ev = numerics.symmetric_spectrum(op.matrix[: D - 1, : D - 1], vectors=False, tol=tol).eigenvalues
    return ev[: max(D - guard + 1, 0)]


def ansatz_levels(s: int, count: int) -> np.ndarray:
    """Exact ``(s+1)/2, 1+s+1/2, 2+s+1/2, ...`` (first ``count`` levels)."""
    lv = np.arange(count) + s + 0.5
    lv[0] = (s + 1) / 2
    return lv


def commutator_defect(cfg: SectorConfig) -> tuple[np.ndarray, dict]:
    """Raw ``[A_z, A_zbar]`` plus interior defects against ``I + s P_0``.

    The report holds the max interior defect of the ladder commutator, the
    same for ``[q, p] - i(I + s P_0)``, the ``(0,0)`` entry, and the corner
    entry ``-(s+D-1)`` that the truncation produces.
    """
    if cfg.D < 3:
        raise ValueError("commutator check needs D >= 3")
    a, ad = ladder_operators(cfg)
    comm = a.matrix @ ad.matrix - ad.matrix @ a.matrix
    target = np.eye(cfg.D, dtype=complex)
    target[0, 0] += cfg.s
    k = cfg.D - 1
    defect = float(np.max(np.abs((comm - target)[:k, :k])))
    q, p = position_momentum(cfg)
    cqp = q.matrix @ p.matrix - p.matrix @ q.matrix
    defect_qp = float(np.max(np.abs((cqp - 1j * target)[:k, :k])))
    exact = commutator_diagonal_exact(cfg)
    report = {
        "s": cfg.s,
        "D": cfg.D,
        "interior_defect": defect,
        "interior_defect_qp": defect_qp,
        "exact_vs_float": float(np.max(np.abs(comm - np.diag(exact)))),
        "ground_entry": exact[0],
        "corner_entry": exact[k],
        "corner_expected": -(cfg.s + cfg.D - 1),
    }
    return comm, report


def commutator_diagonal_exact(cfg: SectorConfig) -> list[int]:
    """Diagonal of the truncated ``[A_z, A_zbar]`` in integer arithmetic.

    ``A_z`` is a weighted shift with squared weights ``s+n+1``, so the
    commutator is diagonal with entries ``w_n^2 - w_{n-1}^2`` (missing
    weights beyond the truncation count as zero).
    """
    w2 = [cfg.s + n + 1 for n in range(cfg.D - 1)]
    return [(w2[n] if n < cfg.D - 1 else 0) - (w2[n - 1] if n else 0) for n in range(cfg.D)]


def annihilation_residual(s: int, z: complex, D: int = DEFAULT_D, tol: float = SERIES_TOL) -> float:
    """``max |(A_z v - z v)_n|`` over ``n < D-1`` for ``v = |z;s>``.

    Zero (to rounding) only for ``s = 0``; reported, never asserted, otherwise.
    """
    cs = coherent_state(s, z, D, tol)
    a, _ = ladder_operators(SectorConfig(s, D))
    r = a.matrix @ cs.coeffs - complex(z) * cs.coeffs
    return float(np.max(np.abs(r[: D - 1])))


# ---------------------------------------------------------------------------
# quantization
# ---------------------------------------------------------------------------


def _as_monomials(f) -> dict[tuple[int, int], complex]:
    if isinstance(f, BivariatePoly):
        return {k: complex(c) for k, c in f.terms.items()}
    if isinstance(f, Mapping):
        out = {}
        for (a, b), c in f.items():
            if a < 0 or b < 0:
                raise ValueError("monomial powers must be nonnegative")
            out[(int(a), int(b))] = complex(c)
        return out
    raise TypeError("observable must be a BivariatePoly or {(a, b): coeff} mapping")


@lru_cache(maxsize=4096)
def _radial_element(s: int, a: int, m: int, n: int) -> float:
    """``c_m c_n int_0^inf t^{a+m} L_s^{(m)}(t) L_s^{(n)}(t) e^{-t} dt``.

    With ``c_n = (-1)^s sqrt(s!/(s+n)!)`` (the sign cancels). The Gauss-Laguerre
    rule carries the ``t^{a+m}`` factor as its weight exponent so only the
    degree-``2s`` Laguerre product is integrated, exactly with ``s+1`` nodes.
    """
    alpha = a + m
    rule = numerics.gauss_rule("laguerre", s + 2, float(alpha))
    x = rule.nodes
    lm = np.array([laguerre_values(s, m, xi)[m] for xi in x])
    ln = np.array([laguerre_values(s, n, xi)[n] for xi in x])
    integral = float(np.dot(rule.normalized_weights, lm * ln))
    log_pref = (
        math.lgamma(alpha + 1)
        + math.lgamma(s + 1)
        - 0.5 * (math.lgamma(s + m + 1) + math.lgamma(s + n + 1))
    )
    return integral * math.exp(log_pref)


def quantize(cfg: SectorConfig, f, label: str = "custom") -> TruncatedOperator:
    """Frame-quantize ``f = sum c_ab z^a zbar^b`` in sector ``cfg.s``.

    ``<m|A_f|n> = (1/pi) int f conj(phi_m) phi_n d^2z``. The angular integral
    kills every term unless ``m - n = b - a``; the surviving radial integral
    is done by :func:`_radial_element`.
    """
    mono = _as_monomials(f)
    D = cfg.D
    out = np.zeros((D, D), dtype=complex)
    for (a, b), c in mono.items():
        if c == 0:
            continue
        shift = b - a
        for m in range(D):
            n = m - shift
            if 0 <= n < D:
                out[m, n] += c * _radial_element(cfg.s, a, m, n)
    return TruncatedOperator(out, cfg.s, label)


def quantize_polar(cfg: SectorConfig, f, n_radial: int | None = None,
                   n_angular: int | None = None, label: str = "custom") -> TruncatedOperator:
    """Oracle: the same integral by a 2-D polar tensor rule on ``phi_{n;s}``.

    Radial Gauss-Laguerre in ``t = |z|^2`` times a uniform angular grid; the
    basis functions are evaluated from their exact ``(z, zbar)`` expansions.
    """
    mono = _as_monomials(f)
    D, s = cfg.D, cfg.s
    deg_f = max((a + b for a, b in mono), default=0)
    max_deg = deg_f + 2 * (D - 1) + 4 * s
    n_angular = n_angular or max_deg + 2
    n_radial = n_radial or max_deg // 2 + 4
    rule = numerics.gauss_rule("laguerre", n_radial, 0.0)
    theta = 2 * np.pi * np.arange(n_angular) / n_angular
    r = np.sqrt(rule.nodes)
    zz = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    w = np.repeat(rule.weights / n_angular, n_angular)
    fv = np.zeros_like(zz)
    for (a, b), c in mono.items():
        fv += c * zz**a * np.conj(zz) ** b
    basis = []
    for n in range(D):
        ph = phi(s, n)
        basis.append(math.sqrt(ph.norm_sq) * ph.poly.evaluate_grid(zz))
    B = np.array(basis)  # (D, points), Gaussian carried by the Laguerre weight
    mat = (np.conj(B) * (w * fv)[None, :]) @ B.T
    return TruncatedOperator(mat, s, label)


def hermite_gram(s: int, n_max: int) -> np.ndarray:
    """``(1/pi) int conj(h^{s+m,s}) h^{s+n,s} e^{-|z|^2} d^2z`` for ``m, n <= n_max`` (polar rule).

    Should equal ``s!(s+n)! delta_{mn}``.
    """
    max_deg = 2 * (n_max + 2 * s)
    rule = numerics.gauss_rule("laguerre", max_deg // 2 + 2, 0.0)
    n_angular = max_deg + 2
    theta = 2 * np.pi * np.arange(n_angular) / n_angular
    zz = (np.sqrt(rule.nodes)[:, None] * np.exp(1j * theta)[None, :]).ravel()
    w = np.repeat(rule.weights / n_angular, n_angular)
    B = np.array([complex_hermite(s + n, s).evaluate_grid(zz) for n in range(n_max + 1)])
    return (np.conj(B) * w[None, :]) @ B.T


Z = {(1, 0): 1.0}
ZBAR = {(0, 1): 1.0}
MOD_Z_SQ = {(1, 1): 1.0}
Q_OBS = {(1, 0): 1 / math.sqrt(2), (0, 1): 1 / math.sqrt(2)}
P_OBS = {(1, 0): -1j / math.sqrt(2), (0, 1): 1j / math.sqrt(2)}


# ---------------------------------------------------------------------------
# lower symbols
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _f11_coeffs(s: int, b: int) -> tuple[float, ...]:
    return tuple(float(c) for c in hyp1f1_poly(s, b).coeffs)


def _f11(s: int, b: int, x: float) -> float:
    acc = 0.0
    for c in reversed(_f11_coeffs(s, b)):
        acc = acc * x + c
    return acc


def lower_symbol_factor_series(s: int, lam: float, tol: float = SERIES_TOL) -> float:
    """``(1/N_s) sum_n C(s+n+1, s) lam^n/n! 1F1(-s;n+1;lam) 1F1(-s;n+2;lam)``.

    Multiplying by the classical ``q`` (resp. ``p``) gives the lower symbol.
    """
    acc = numerics.SeriesAccumulator(tol=tol)
    n = 0
    while True:
        logw = (n * math.log(lam) if lam > 0 else (0.0 if n == 0 else -math.inf)) - math.lgamma(n + 1)
        term = math.comb(s + n + 1, s) * math.exp(logw) * _f11(s, n + 1, lam) * _f11(s, n + 2, lam)
        if acc.add(term) and n > lam + s:
            break
        n += 1
        if n > MAX_DIMENSION:
            raise TruncationError("lower-symbol series did not converge")
    return (acc.total + acc._comp) / normalization(s, lam, tol)


@dataclass
class LowerSymbols:
    z: complex
    sector: int
    q_check: float
    p_check: float
    q_series: float
    p_series: float
    q_matrix: float
    p_matrix: float
    dimension: int
    extra: dict = field(default_factory=dict)


def lower_symbols(cfg: SectorConfig, z: complex, agree_tol: float = 1e-9) -> LowerSymbols:
    """``<z;s|q|z;s>`` and ``<z;s|p|z;s>`` by the 1F1 series and by contraction.

    The contraction runs in dimension ``max(cfg.D, required + 2)`` so the
    truncated state is complete to ``cfg.series_tol``.
    """
    z = complex(z)
    lam = abs(z) ** 2
    q_cl, p_cl = math.sqrt(2) * z.real, math.sqrt(2) * z.imag
    factor = lower_symbol_factor_series(cfg.s, lam, cfg.series_tol)
    D = max(cfg.D, required_dimension(cfg.s, lam, cfg.series_tol) + 2)
    work = SectorConfig(cfg.s, D, cfg.series_tol)
    cs = coherent_state(cfg.s, z, D, cfg.series_tol)
    q, p = position_momentum(work)
    v = cs.coeffs
    qm = float(np.real(np.vdot(v, q.matrix @ v)))
    pm = float(np.real(np.vdot(v, p.matrix @ v)))
    qs, ps = q_cl * factor, p_cl * factor
    for name, a, b in (("q", qs, qm), ("p", ps, pm)):
        if abs(a - b) > agree_tol * max(1.0, abs(a)):
            raise ConsistencyError(f"lower symbol {name}: series {a!r} vs contraction {b!r}")
    return LowerSymbols(z, cfg.s, qm, pm, qs, ps, qm, pm, D, {"factor": factor})


def q_check_closed_s1(z: complex) -> float:
    """``q (1 + 1/(e^{|z|^2} - |z|^2))`` for sector 1."""
    z = complex(z)
    lam = abs(z) ** 2
    return math.sqrt(2) * z.real * (1 + 1 / (math.exp(lam) - lam))
