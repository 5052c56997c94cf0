"""Number statistics of the sector-``s`` coherent states.

``P_s(n; lam) = s!/N_s(lam) * lam^n/(s+n)! * (L_s^{(n)}(lam))^2`` generalises
the Poisson law (``s = 0``). Moments and the Mandel parameter are computed
from the tabulated distribution; the sector-1 closed forms are cross-checks.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .complex_cs import _log_weights, laguerre_values, normalization
from .errors import NoSignChangeError, NumericalPreconditionError

TAIL_TOL = 1e-12
N_MAX_CAP = 100_000


@dataclass
class DistributionTable:
    s: int
    lam: float
    n: np.ndarray
    p: np.ndarray
    tail_mass: float
    mean: float
    variance: float

    @property
    def mandel_q(self) -> float:
        if self.mean <= 0:
            raise NumericalPreconditionError("Mandel parameter undefined for zero mean (lambda = 0)")
        return self.variance / self.mean - 1.0

    @property
    def rows(self):
        return list(zip(self.n.tolist(), self.p.tolist()))

    def local_maxima(self) -> list[int]:
        """Indices ``n`` with ``P(n) > P(n-1)`` and ``P(n) >= P(n+1)`` (edges one-sided)."""
        p = self.p
        out = []
        for k in range(len(p)):
            left = p[k - 1] if k else -math.inf
            right = p[k + 1] if k + 1 < len(p) else -math.inf
            if p[k] > left and p[k] >= right:
                out.append(int(k))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "p"])
        for n, p in zip(self.n, self.p):
            w.writerow([int(n), repr(float(p))])
        return buf.getvalue()


def _probabilities(s: int, lam: float, n_max: int, norm: float) -> np.ndarray:
    logw = _log_weights(s, n_max, lam)
    lag = laguerre_values(s, n_max, lam)
    return np.exp(logw - math.log(norm)) * lag**2


def distribution(s: int, lam: float, n_max: int | None = None, tail_tol: float = TAIL_TOL) -> DistributionTable:
    """Tabulate ``P_s(n; lam)`` for ``n = 0..n_max``.

    ``n_max`` doubles until the mass beyond it is below ``tail_tol`` (capped
    at 100000). The tail mass is summed separately rather than taken as
    ``1 - sum(rows)``, so ``sum(rows) + tail_mass = 1`` is a real check of the
    normalization series.
    """
    if lam < 0:
        raise ValueError("lambda = |z|^2 must be nonnegative")
    if s < 0:
        raise ValueError("sector s must be nonnegative")
    norm = normalization(s, lam)
    n_max = int(n_max) if n_max is not None else max(20, int(lam + 10 * math.sqrt(lam + 1)))
    while True:
        probe = max(2 * n_max, n_max + 64)
        p_all = _probabilities(s, lam, probe, norm)
        tail = math.fsum(p_all[n_max + 1 :])
        if tail < tail_tol or n_max >= N_MAX_CAP:
            break
        n_max = min(2 * n_max, N_MAX_CAP)
    p = p_all[: n_max + 1]
    n = np.arange(n_max + 1)
    # moments over the full probe range so the truncated tail does not bias them
    mean = math.fsum(np.arange(len(p_all)) * p_all)
    var = math.fsum((np.arange(len(p_all)) - mean) ** 2 * p_all)
    if tail >= tail_tol:
        raise NumericalPreconditionError(f"tail mass {tail:.2e} above {tail_tol:.0e} at n_max cap")
    return DistributionTable(s=s, lam=float(lam), n=n, p=p, tail_mass=tail, mean=mean, variance=var)


def poisson_corrected_s1(n: int, lam: float) -> float:
    """Sector-1 closed form ``e^{-lam} lam^n/n! (n+1)/(1-e^{-lam} lam) (1 - lam/(n+1))^2``."""
    logp = -lam + (n * math.log(lam) if lam > 0 else (0.0 if n == 0 else -math.inf)) - math.lgamma(n + 1)
    return math.exp(logp) * (n + 1) / (1 - math.exp(-lam) * lam) * (1 - lam / (n + 1)) ** 2


def mandel_q_closed_s1(lam: float) -> float:
    """Sector-1 Mandel parameter in closed form.

    Above ``lam = 300`` numerator and denominator are divided by ``e^{2 lam}``
    before evaluation.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if lam <= 300:
        e = math.exp(lam)
        num = e * lam**2 + 2 * e + 4 * e * lam - 2 * e * e - lam
        den = (e - lam) * (1 + e)
        return -num / den
    em = math.exp(-lam)
    num = lam**2 * em + 2 * em + 4 * lam * em - 2 - lam * em * em
    den = (1 - lam * em) * (1 + em)
    return -num / den


def mandel_q_series(s: int, lam: float) -> float:
    """``Q_M = variance/mean - 1`` from the tabulated distribution."""
    if lam == 0:
        raise NumericalPreconditionError("Mandel parameter undefined at lambda = 0 (zero mean)")
    return distribution(s, lam).mandel_q


def mandel_sweep(s: int, lams) -> np.ndarray:
    return np.array([mandel_q_series(s, float(l)) for l in lams])


def transition_point(s: int, bracket: tuple[float, float] = (1.0, 3.0), tol: float = 1e-10,
                     scan: int = 64) -> float:
    """Sub/super-Poissonian transition: root of ``lam -> Q_M(s, lam)``.

    The bracket is scanned on a grid first; bisection runs on the first
    sub-interval with a sign change. ``s = 0`` (``Q_M == 0``) has none.
    """
    lo, hi = bracket
    grid = np.linspace(lo, hi, scan + 1)
    vals = [mandel_q_series(s, float(g)) for g in grid]
    eps = 1e-12
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if abs(fa) > eps and abs(fb) > eps and fa * fb < 0:
            return numerics.find_root(lambda l: mandel_q_series(s, l), (float(a), float(b)), tol)
    raise NoSignChangeError(f"Q_M for s={s} has no sign change on [{lo}, {hi}]")


def mandel_csv(lams, qs) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda", "q"])
    for l, q in zip(lams, qs):
        w.writerow([repr(float(l)), repr(float(q))])
    return buf.getvalue()


#: reference relative maxima of P_1(n; lam) on n = 0..20 for lam = 1, 3, 10
EXPECTED_MAXIMA = {1: [3], 3: [0, 5], 10: [5, 14]}


def maxima_report(lams=(1, 3, 10), n_max: int = 20) -> dict:
    """Relative maxima of ``P_1(n; lam)`` on ``n = 0..n_max`` next to :data:`EXPECTED_MAXIMA`."""
    out = {}
    for lam in lams:
        d = distribution(1, float(lam))
        sub = DistributionTable(1, d.lam, d.n[: n_max + 1], d.p[: n_max + 1], 0.0, d.mean, d.variance)
        got = sub.local_maxima()
        want = EXPECTED_MAXIMA.get(lam)
        out[lam] = {"computed": got, "expected": want, "agrees": got == want}
    return out


def large_lambda_report(lams=(10.0, 50.0, 100.0, 500.0)) -> dict:
    """Closed-form sector-1 Q_M at growing lambda; it tends to 2, not to 0."""
    vals = {float(l): mandel_q_closed_s1(l) for l in lams}
    return {"values": vals, "limit": 2.0, "tends_to_zero": False}
