"""Registry of the library's invariants, run by ``csq verify``.

Each check is a zero-argument function returning ``(passed, detail)``.
Checks are grouped by module so a failure can be attributed.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import complex_cs as cc
from . import numerics, photon_stats, real_frame, susy
from .poly import BivariatePoly, UnivariatePoly, complex_hermite, hermite, ladder_check, laguerre_form, phi

MODULES = ("poly_core", "numerics", "complex_cs", "photon_stats", "real_frame", "susy")


@dataclass(frozen=True)
class Check:
    module: str
    name: str
    fn: Callable[[], tuple[bool, str]]


@dataclass
class CheckResult:
    module: str
    name: str
    passed: bool
    detail: str
    seconds: float


REGISTRY: list[Check] = []


def check(module: str, name: str):
    def deco(fn):
        REGISTRY.append(Check(module, name, fn))
        return fn

    return deco


def _rng():
    return np.random.default_rng(20240611)


def _le(value: float, tol: float) -> tuple[bool, str]:
    return bool(value <= tol), f"{value:.3e} <= {tol:.0e}"


# ---------------------------------------------------------------------------
# poly_core
# ---------------------------------------------------------------------------


@check("poly_core", "univariate leading coefficient and exact rational evaluation")
def _uni_exact():
    for n in range(12):
        p = hermite(n)
        if p.coeffs[-1] == 0:
            return False, f"H_{n} stores a zero leading coefficient"
        x = Fraction(3, 7)
        direct = sum(c * x**k for k, c in enumerate(p.coeffs))
        if p(x) != direct or not isinstance(p(x), Fraction):
            return False, f"H_{n}(3/7) not exact"
    zero = UnivariatePoly([0, 0])
    return zero.coeffs == () or list(zero.coeffs) == [], "ok"


@check("poly_core", "complex Hermite storage, degree and conjugation symmetry")
def _ch_structure():
    for s in range(5):
        for n in range(7):
            h = complex_hermite(s + n, s)
            if any(c == 0 for c in h.terms.values()):
                return False, f"stored zero in h^{s + n},{s}"
            if h.degree != n + 2 * s:
                return False, f"degree of h^{s + n},{s} is {h.degree}"
            if h.conjugate() != complex_hermite(s, s + n):
                return False, f"conjugation symmetry fails at ({s + n},{s})"
    return True, "s<=4, n<=6"


@check("poly_core", "Laguerre form of h^{r,s} for s <= r <= 8")
def _laguerre_identity():
    for r in range(9):
        for s in range(r + 1):
            if complex_hermite(r, s) != laguerre_form(r, s):
                return False, f"mismatch at ({r},{s})"
    return True, "exact"


@check("poly_core", "phi evaluation matches the Laguerre normalisation")
def _phi_eval():
    from scipy.special import eval_genlaguerre

    worst = 0.0
    for s in range(4):
        for n in range(6):
            for z in (0.3 + 0.4j, -1.1 + 0.2j, 0.7 - 1.3j):
                lam = abs(z) ** 2
                ref = ((-1) ** s * math.sqrt(math.factorial(s) / math.factorial(s + n))
                       * np.conj(z) ** n * eval_genlaguerre(s, n, lam) * math.exp(-lam / 2))
                worst = max(worst, abs(phi(s, n)(z) - ref) / max(1.0, abs(ref)))
    return _le(worst, 1e-12)


@check("poly_core", "six ladder identities exact for s <= 4, n <= 6")
def _ladders():
    bad = [(s, n) for s in range(5) for n in range(7) if not ladder_check(s, n)]
    return not bad, f"failures {bad}" if bad else "35 cases exact"


@check("poly_core", "complex Hermite orthogonality by polar quadrature")
def _ch_orth():
    worst = 0.0
    for s in range(4):
        G = cc.hermite_gram(s, 6)
        d = np.array([math.factorial(s) * math.factorial(s + n) for n in range(7)], dtype=float)
        worst = max(worst, float(np.max(np.abs(G - np.diag(d)) / np.sqrt(np.outer(d, d)))))
    return _le(worst, 1e-10)


@check("poly_core", "Hermite orthogonality with an exact rule")
def _h_orth():
    worst = 0.0
    for m in range(10):
        for n in range(10):
            rule = real_frame.rule_for_degree(m + n)
            hv = real_frame.hermite_values(max(m, n), rule.nodes)
            val = rule.integrate(hv[m] * hv[n]) / math.sqrt(math.pi)
            ref = math.factorial(n) * 2**n if m == n else 0.0
            worst = max(worst, abs(val - ref) / (math.factorial(max(m, n)) * 2 ** max(m, n)))
    return _le(worst, 1e-12)


# ---------------------------------------------------------------------------
# numerics
# ---------------------------------------------------------------------------


@check("numerics", "Gauss rules: weight sums and monomial exactness")
def _rules():
    worst = 0.0
    for kind, alphas in (("hermite", (0.0,)), ("laguerre", (0.0, 2.0, 7.5))):
        for alpha in alphas:
            for m in (1, 2, 5, 16, 40):
                rule = numerics.gauss_rule(kind, m, alpha)
                mass = math.sqrt(math.pi) if kind == "hermite" else math.gamma(alpha + 1)
                worst = max(worst, abs(rule.weights.sum() - mass) / mass, rule.moments_check())
    return _le(worst, 1e-12)


@check("numerics", "Jacobi matrix eigenvalues reproduce the rule nodes")
def _jacobi_loop():
    worst = 0.0
    for kind in ("hermite", "laguerre"):
        for m in (3, 11, 30):
            nodes = numerics.gauss_rule(kind, m).nodes
            ev = numerics.symmetric_spectrum(numerics.jacobi_matrix(kind, m), vectors=False).eigenvalues
            worst = max(worst, float(np.max(np.abs(np.sort(ev) - nodes) / np.maximum(1, np.abs(nodes)))))
    return _le(worst, 1e-12)


@check("numerics", "eigen residual and orthonormality")
def _eigs():
    A = _rng().standard_normal((30, 30))
    res = numerics.symmetric_spectrum(A + A.T)
    V = res.eigenvectors
    return _le(max(res.residual, float(np.max(np.abs(V.T @ V - np.eye(30))))), 1e-10)


@check("numerics", "exponential series for lambda <= 30")
def _exp_series():
    worst = 0.0
    for lam in (0.0, 0.5, 3.0, 12.0, 30.0):
        terms = (math.exp(k * math.log(lam) - math.lgamma(k + 1)) if lam else float(k == 0) for k in range(10_000))
        worst = max(worst, abs(numerics.sum_series(terms) - math.exp(lam)) / math.exp(lam))
    return _le(worst, 1e-13)


@check("numerics", "bisection roots")
def _roots():
    r1 = numerics.find_root(lambda x: x - 1, (0, 2), 1e-12)
    r2 = numerics.find_root(lambda x: float(hermite(3)(x)), (0.5, 2), 1e-12)
    return _le(max(abs(r1 - 1), abs(r2 - math.sqrt(1.5))), 1e-11)


# ---------------------------------------------------------------------------
# complex_cs
# ---------------------------------------------------------------------------


@check("complex_cs", "operator dimensions follow SectorConfig")
def _dims():
    cfg = cc.SectorConfig(1, 7)
    mats = [*cc.ladder_operators(cfg), *cc.position_momentum(cfg), *cc.hamiltonians(cfg)]
    return all(m.matrix.shape == (7, 7) for m in mats), "7x7"


@check("complex_cs", "coherent state norm equals 1 - tail")
def _cs_norm():
    worst = 0.0
    for s in range(4):
        for z in (0.2, 1 + 1j, -2.0 + 0.5j):
            st = cc.coherent_state(s, z)
            worst = max(worst, abs(np.sum(np.abs(st.coeffs) ** 2) - (1 - st.tail)))
            if st.tail >= cc.SERIES_TOL:
                return False, "tail above tolerance"
    return _le(worst, 1e-13)


@check("complex_cs", "self-adjointness; A_zbar is the adjoint of A_z")
def _herm():
    for s in range(4):
        cfg = cc.SectorConfig(s, 20)
        a, ad = cc.ladder_operators(cfg)
        if not np.array_equal(ad.matrix, a.matrix.conj().T):
            return False, f"A_zbar != A_z^dagger at s={s}"
        for op in (*cc.position_momentum(cfg), *cc.hamiltonians(cfg)):
            if not op.is_hermitian(1e-12):
                return False, f"{op.label} not Hermitian at s={s}"
    return True, "s<=3, D=20"


@check("complex_cs", "quantizing 1 resolves the identity")
def _resolution_c():
    worst = 0.0
    for s in range(4):
        for D in (2, 10, 20):
            worst = max(worst, float(np.max(np.abs(cc.quantize(cc.SectorConfig(s, D), {(0, 0): 1.0}).matrix - np.eye(D)))))
    return _le(worst, 1e-12)


@check("complex_cs", "closed-form operators equal their quantized reconstruction")
def _oracle():
    worst = 0.0
    for s in range(3):
        for D in (2, 6, 10):
            cfg = cc.SectorConfig(s, D)
            a, ad = cc.ladder_operators(cfg)
            q, p = cc.position_momentum(cfg)
            h_cs, _ = cc.hamiltonians(cfg)
            pairs = [(a, cc.Z), (ad, cc.ZBAR), (q, cc.Q_OBS), (p, cc.P_OBS), (h_cs, cc.MOD_Z_SQ)]
            for op, f in pairs:
                for quant in (cc.quantize(cfg, f), cc.quantize_polar(cfg, f)):
                    worst = max(worst, float(np.max(np.abs(op.matrix - quant.matrix))))
    return _le(worst, 1e-9)


@check("complex_cs", "commutator interior is I + s P0; corner is -(s+D-1)")
def _commutator():
    worst = 0.0
    for s in range(4):
        _, rep = cc.commutator_defect(cc.SectorConfig(s, 40))
        worst = max(worst, rep["interior_defect"], rep["interior_defect_qp"])
        if rep["corner_entry"] != -(s + 39) or rep["ground_entry"] != 1 + s:
            return False, f"exact entries wrong at s={s}: {rep['ground_entry']}, {rep['corner_entry']}"
    return _le(worst, 1e-12)


@check("complex_cs", "number Hamiltonian diagonal and ansatz spectrum below the guard band")
def _spectra():
    worst = 0.0
    for s in range(4):
        D = 40
        h_cs, h_ans = cc.hamiltonians(cc.SectorConfig(s, D))
        if not np.array_equal(np.diag(h_cs.matrix).real, np.arange(D) + 2 * s + 1.0):
            return False, f"H_cs diagonal wrong at s={s}"
        ev = cc.interior_spectrum(h_ans)
        worst = max(worst, float(np.max(np.abs(ev - cc.ansatz_levels(s, len(ev))))))
        if abs(h_ans.matrix[D - 1, D - 1].real - (s + D - 1) / 2) > 1e-12:
            return False, f"corner entry of H_ansatz unexpected at s={s}"
        if abs((ev[1] - ev[0]) - (s / 2 + 1)) > 1e-8:
            return False, f"first gap wrong at s={s}"
    return _le(worst, 1e-8)


@check("complex_cs", "s=0 coherent state is an eigenvector of A_z; s>=1 residual reported")
def _eigvec():
    r0 = cc.annihilation_residual(0, 1.2 - 0.7j)
    r1 = cc.annihilation_residual(1, 1.2 - 0.7j)
    ok, msg = _le(r0, 1e-13)
    return ok, f"s=0 {msg}; s=1 residual {r1:.3e} (not an eigenvector)"


@check("complex_cs", "lower symbols: closed form at s=1 and identity at s=0")
def _lower_c():
    worst = 0.0
    for z in (0.1, 0.5 + 0.5j, 1.5 - 0.3j, 2.8j, 4.0):
        ls1 = cc.lower_symbols(cc.SectorConfig(1, cc.DEFAULT_D), z)
        worst = max(worst, abs(ls1.q_matrix - cc.q_check_closed_s1(z)))
        ls0 = cc.lower_symbols(cc.SectorConfig(0, cc.DEFAULT_D), z)
        worst = max(worst, abs(ls0.q_matrix - math.sqrt(2) * z.real), abs(ls0.p_matrix - math.sqrt(2) * complex(z).imag))
    return _le(worst, 1e-9)


# ---------------------------------------------------------------------------
# photon_stats
# ---------------------------------------------------------------------------


@check("photon_stats", "probabilities nonnegative and normalised")
def _probs():
    worst = 0.0
    for s in range(4):
        for lam in (0.0, 0.3, 1.0, 5.0, 17.0, 30.0):
            d = photon_stats.distribution(s, lam)
            if np.any(d.p < 0):
                return False, "negative probability"
            worst = max(worst, abs(math.fsum(d.p) + d.tail_mass - 1))
    return _le(worst, 1e-12)


@check("photon_stats", "sector-1 Mandel series equals the closed form")
def _mandel_closed():
    worst = max(abs(photon_stats.mandel_q_series(1, l) - photon_stats.mandel_q_closed_s1(l))
                for l in (0.1, 0.5, 1.0, 1.81, 3.0, 10.0, 50.0))
    return _le(worst, 1e-9)


@check("photon_stats", "P_1(lambda-1; lambda) vanishes")
def _zero_row():
    worst = max(abs(photon_stats.distribution(1, float(l)).p[l - 1]) for l in range(1, 11))
    return worst == 0.0, f"max {worst!r}"


@check("photon_stats", "Mandel parameter: zero at s=0, root near 1.81, limit 2")
def _mandel_facts():
    q0 = max(abs(photon_stats.mandel_q_series(0, l)) for l in (0.5, 2.0, 9.0))
    root = photon_stats.transition_point(1)
    q50 = photon_stats.mandel_q_closed_s1(50.0)
    ok = q0 < 1e-12 and abs(root - 1.81) <= 0.005 and abs(q50 - 2) <= 1e-6
    return ok, f"|Q_0|={q0:.1e}, root={root:.10f}, Q(50)={q50:.12f}"


@check("photon_stats", "relative maxima of P_1 (compared, discrepancies reported)")
def _maxima():
    rep = photon_stats.maxima_report()
    txt = "; ".join(f"lam={k}: {v['computed']} vs {v['expected']}" for k, v in rep.items())
    return True, txt


# ---------------------------------------------------------------------------
# real_frame
# ---------------------------------------------------------------------------


@check("real_frame", "Christoffel-Darboux sum equals closed form")
def _cd():
    xs = _rng().uniform(-4, 4, 50)
    worst = 0.0
    for N in range(13):
        a, b = real_frame.cd_sum(N, xs), real_frame.cd_closed(N, xs)
        worst = max(worst, float(np.max(np.abs(a - b) / np.abs(a))))
    return _le(worst, 1e-10)


@check("real_frame", "frame states have unit norm")
def _frame_norm():
    worst = max(abs(np.linalg.norm(real_frame.frame_state(N, x).coeffs) - 1)
                for N in range(13) for x in (-3.0, -0.4, 0.0, 1.7, 5.0))
    return _le(worst, 1e-12)


@check("real_frame", "resolution of identity and quantized 1")
def _resolution_r():
    worst = 0.0
    one = UnivariatePoly([1])
    for N in range(13):
        worst = max(worst, real_frame.resolution_check(N),
                    float(np.max(np.abs(real_frame.quantize_fn(N, one).matrix - np.eye(N + 1)))))
    return _le(worst, 1e-12)


@check("real_frame", "Hermite-coefficient path equals quadrature path")
def _hseries():
    rng = _rng()
    worst = 0.0
    for trial in range(20):
        N = int(rng.integers(0, 9))
        deg = int(rng.integers(0, 2 * N + 1))
        p = UnivariatePoly([Fraction(int(c), 7) for c in rng.integers(-9, 10, deg + 1)])
        if p.degree < 0:
            continue
        A = real_frame.quantize_fn(N, p).matrix
        B = real_frame.quantize_hermite_series(N, real_frame.poly_to_hermite(p)).matrix
        worst = max(worst, float(np.max(np.abs(A - B)) / max(1.0, np.max(np.abs(A)))))
    return _le(worst, 1e-10)


@check("real_frame", "position matrix: tridiagonal sqrt(k/2), spectrum = H_{N+1} roots = nodes")
def _position():
    worst = 0.0
    for N in range(1, 13):
        A = real_frame.position_matrix(N)
        ref = np.zeros((N + 1, N + 1))
        for k in range(1, N + 1):
            ref[k - 1, k] = ref[k, k - 1] = math.sqrt(k / 2)
        if not np.array_equal(A, ref):
            return False, f"A_x entries differ at N={N}"
        ev = real_frame.position_spectrum(N).eigenvalues
        roots = real_frame.hermite_roots(N + 1)
        nodes = numerics.gauss_rule("hermite", N + 1).nodes
        worst = max(worst, float(np.max(np.abs(ev - roots))), float(np.max(np.abs(ev - nodes))))
    return _le(worst, 1e-10)


@check("real_frame", "lower symbol of x is odd and bounded by the spectrum of A_x")
def _x_check():
    ts = np.linspace(-6, 6, 241)
    x = UnivariatePoly.x()
    for N in range(0, 9):
        v = real_frame.lower_symbol(N, x, ts)
        if np.max(np.abs(v + v[::-1])) > 1e-12:
            return False, f"not odd at N={N}"
        if np.max(np.abs(v)) > np.max(np.abs(real_frame.position_spectrum(N).eigenvalues)) + 1e-12:
            return False, f"bound violated at N={N}"
    return True, "N<=8"


@check("real_frame", "N=0 moments exact; N=1 lower symbol of x")
def _lower_r():
    x = UnivariatePoly.x()
    for k in range(1, 5):
        want = Fraction(math.prod(range(1, 2 * k, 2)), 2**k)
        for t in (Fraction(0), Fraction(3, 2), Fraction(-5, 3)):
            if real_frame.lower_symbol_exact(0, x ** (2 * k), t) != want:
                return False, f"x^{2 * k} moment wrong"
            if real_frame.lower_symbol_exact(0, x ** (2 * k - 1), t) != 0:
                return False, f"odd moment x^{2 * k - 1} nonzero"
    ts = np.linspace(-5, 5, 200)
    err = float(np.max(np.abs(real_frame.lower_symbol(1, x, ts) - 2 * ts / (1 + 2 * ts**2))))
    return _le(err, 1e-12)


# ---------------------------------------------------------------------------
# susy
# ---------------------------------------------------------------------------

_SUSY_PARAMS = ((-0.5, 0.0), (-1.0, 0.3), (-1.5, -0.6), (0.2, 0.5))


@check("susy", "seed solutions nodeless; eps=-1/2, mu=0 gives exp(x^2/2)")
def _seed():
    for eps, mu in _SUSY_PARAMS:
        seed = susy.seed_solution(eps, mu, 10.0, 0.02)
        if np.min(seed.values) <= 0:
            return False, f"node at eps={eps}, mu={mu}"
    seed = susy.seed_solution(-0.5, 0.0, 12.0, 0.01)
    err = float(np.max(np.abs(seed.values / np.exp(seed.grid**2 / 2) - 1)))
    return _le(err, 1e-13)


@check("susy", "ODE and factorisation residuals are O(h^2)")
def _orders():
    ratios = []
    for eps, mu in _SUSY_PARAMS:
        a = susy.seed_solution(eps, mu, 8.0, 0.02)
        b = susy.seed_solution(eps, mu, 8.0, 0.01)
        ratios.append(a.ode_residual() / b.ode_residual())
        ratios.append(susy.factorization_residual(a) / susy.factorization_residual(b))
    lo, hi = min(ratios), max(ratios)
    return bool(3.5 < lo and hi < 4.5), f"halving ratios in [{lo:.3f}, {hi:.3f}]"


@check("susy", "partner spectrum matches shifted ansatz levels for s <= 3")
def _identify():
    worst = max(susy.identify_with_H_ansatz(s)["max_abs_diff"] for s in range(4))
    return _le(worst, 5e-3)


@check("susy", "partner ground state is 1/u to O(h^2); excited states A psi_{n-1}")
def _states():
    d = []
    for h in (0.02, 0.01):
        part = susy.partner_spectrum(susy.seed_solution(-1.0, 0.3, 10.0, h), k=4)
        d.append(susy.ground_state_distance(part))
        exc = susy.excited_state_distances(part, 3)
    ratio = d[0] / d[1]
    norm_err = max(abs(v["norm_sq"] - v["norm_sq_expected"]) for v in exc.values())
    dist = max(v["distance"] for v in exc.values())
    ok = 3.5 < ratio < 4.5 and dist < 1e-3 and norm_err < 1e-3
    return ok, f"ground ratio {ratio:.3f}, excited dist {dist:.1e}, norm err {norm_err:.1e}"


@check("susy", "1/u is square integrable beyond the box")
def _tail():
    worst = max(susy.inverse_seed_tail(eps, mu, 12.0) for eps, mu in _SUSY_PARAMS)
    return _le(worst, 1e-8)


def run_all(modules=None) -> list[CheckResult]:
    out = []
    for c in REGISTRY:
        if modules and c.module not in modules:
            continue
        t0 = time.perf_counter()
        try:
            ok, detail = c.fn()
        except Exception as exc:  # a crash is a failed invariant
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(c.module, c.name, bool(ok), detail, time.perf_counter() - t0))
    return out
