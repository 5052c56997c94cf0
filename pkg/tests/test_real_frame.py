import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csq import numerics, real_frame as rf
from csq.errors import NumericalPreconditionError
from csq.poly import UnivariatePoly

X = UnivariatePoly.x()

# lower symbols integrated symbolically (sympy), as functions of t
LSYM_ORACLE = {
    (1, 2): lambda t: (6 * t**2 + 1) / (2 * (2 * t**2 + 1)),
    (2, 1): lambda t: 8 * t**3 / (4 * t**4 + 3),
    (2, 3): lambda t: 6 * t * (2 * t - 1) * (2 * t + 1) / (4 * t**4 + 3),
    (1, 3): lambda t: 3 * t / (2 * t**2 + 1),
}


@pytest.mark.parametrize("key", sorted(LSYM_ORACLE))
def test_lower_symbol_against_symbolic(key):
    N, k = key
    ts = np.linspace(-4, 4, 81)
    assert np.allclose(rf.lower_symbol(N, X**k, ts), LSYM_ORACLE[key](ts), rtol=1e-12, atol=1e-13)
    assert rf.lower_symbol_exact(N, X**k, Fraction(1, 3)) == Fraction(LSYM_ORACLE[key](Fraction(1, 3)))


def test_n1_position_curve():
    ts = np.linspace(-5, 5, 200)
    assert np.max(np.abs(rf.lower_symbol(1, X, ts) - 2 * ts / (1 + 2 * ts**2))) < 1e-12


@pytest.mark.parametrize("k", range(1, 5))
def test_n0_even_moments_exact(k):
    want = Fraction(math.prod(range(1, 2 * k, 2)), 2**k)
    for t in (Fraction(0), Fraction(7, 4), Fraction(-2)):
        assert rf.lower_symbol_exact(0, X ** (2 * k), t) == want
        assert rf.lower_symbol_exact(0, X ** (2 * k - 1), t) == 0


def test_definitional_route_agrees():
    f = X**3 - X * UnivariatePoly([Fraction(1, 2)])
    for N in (0, 2, 5):
        for t in (-1.3, 0.2, 2.4):
            assert rf.lower_symbol_definitional(N, f, t) == pytest.approx(float(rf.lower_symbol(N, f, t)), abs=1e-12)


def test_insufficient_rule_rejected():
    with pytest.raises(NumericalPreconditionError):
        rf.lower_symbol(4, X**2, 0.5, rule=rf.hermite_rule(3))


def test_cd_forms_and_overlap():
    xs = np.random.default_rng(5).uniform(-4, 4, 50)
    for N in range(13):
        assert np.allclose(rf.cd_sum(N, xs), rf.cd_closed(N, xs), rtol=1e-10)
    assert rf.overlap(1, 0.0, 1.0) == pytest.approx(1 / math.sqrt(3), abs=1e-15)
    assert rf.overlap(3, 0.7, 0.7) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("N", [0, 1, 5, 12])
def test_resolution_and_identity(N):
    assert rf.resolution_check(N) < 1e-12
    assert np.max(np.abs(rf.quantize_fn(N, UnivariatePoly([1])).matrix - np.eye(N + 1))) < 1e-12


def test_undersized_rule_breaks_resolution():
    assert rf.resolution_check(5, rf.hermite_rule(3)) > 0.5


def test_quantized_square():
    assert np.allclose(rf.quantize_fn(1, X**2).matrix, np.diag([0.5, 1.5]), atol=1e-15)


@pytest.mark.parametrize("N", range(1, 13))
def test_position_matrix_and_spectrum(N):
    A = rf.position_matrix(N)
    assert np.array_equal(np.diag(A, 1), np.sqrt(np.arange(1, N + 1) / 2))
    assert np.count_nonzero(A - np.diag(np.diag(A, 1), 1) - np.diag(np.diag(A, 1), -1)) == 0
    ev = rf.position_spectrum(N).eigenvalues
    assert np.max(np.abs(ev - rf.hermite_roots(N + 1))) < 1e-10
    assert np.max(np.abs(ev - numerics.gauss_rule("hermite", N + 1).nodes)) < 1e-10
    assert np.allclose(rf.quantize_fn(N, X).matrix, A, atol=1e-13)


def test_two_level_spectrum():
    assert np.allclose(rf.position_spectrum(2).eigenvalues, [-math.sqrt(1.5), 0, math.sqrt(1.5)], atol=1e-15)


def test_monomial_to_hermite_roundtrip():
    # x^3 = (H_3 + 6 H_1)/8
    assert rf.monomial_to_hermite(3) == [0, Fraction(3, 4), 0, Fraction(1, 8)]
    p = X**5 - X * UnivariatePoly([3])
    assert rf.hermite_to_poly(rf.poly_to_hermite(p)) == p


def _random_poly(seed, deg):
    rng = np.random.default_rng(seed)
    return UnivariatePoly([Fraction(int(c), int(d)) for c, d in zip(rng.integers(-9, 10, deg + 1), rng.integers(1, 6, deg + 1))])


@pytest.mark.parametrize("seed", range(20))
def test_hermite_series_path_equals_quadrature(seed):
    rng = np.random.default_rng(100 + seed)
    N = int(rng.integers(0, 9))
    p = _random_poly(seed, int(rng.integers(0, 2 * N + 1)))
    if p.degree < 0:
        pytest.skip("zero polynomial drawn")
    A = rf.quantize_fn(N, p).matrix
    B = rf.quantize_hermite_series(N, rf.poly_to_hermite(p)).matrix
    assert np.max(np.abs(A - B)) <= 1e-10 * max(1.0, np.max(np.abs(A)))


def test_smooth_observable_converges():
    op = rf.quantize_fn(3, np.tanh)
    assert np.allclose(op.matrix, op.matrix.T, atol=1e-12)
    ts = np.linspace(-3, 3, 13)
    v = rf.lower_symbol(3, np.tanh, ts)
    assert np.allclose(v, -v[::-1], atol=1e-12)


def test_faithful_sector_widens_with_n():
    widths = [rf.faithful_sector(N)[1] for N in (1, 2, 3, 5, 10, 20)]
    assert all(b > a for a, b in zip(widths, widths[1:]))
    crossings = [rf.diagonal_crossings(N)[-1] for N in (1, 2, 3, 5, 10)]
    assert all(b > a for a, b in zip(crossings, crossings[1:]))
    assert rf.diagonal_crossings(1)[-1] == pytest.approx(1 / math.sqrt(2), abs=1e-9)


def test_operator_dump_has_zero_imaginary_part():
    d = rf.RealOperator(rf.position_matrix(2), "x", "tridiagonal").to_dict()
    assert np.array_equal(np.array(d["im"]), np.zeros((3, 3)))


def test_lower_symbol_csv_header():
    assert rf.lower_symbol_csv([0.0], [1.0], [2.0]).splitlines() == ["t,classical,check", "0.0,1.0,2.0"]


@settings(max_examples=25, deadline=None)
@given(N=st.integers(0, 10), t=st.floats(-6, 6))
def test_lower_symbol_odd_and_bounded(N, t):
    v, w = float(rf.lower_symbol(N, X, t)), float(rf.lower_symbol(N, X, -t))
    assert abs(v + w) < 1e-12
    assert abs(v) <= np.max(np.abs(rf.position_spectrum(N).eigenvalues)) + 1e-12


@settings(max_examples=25, deadline=None)
@given(N=st.integers(0, 12), x=st.floats(-5, 5))
def test_frame_state_unit_norm(N, x):
    assert abs(np.linalg.norm(rf.frame_state(N, x).coeffs) - 1) < 1e-12
