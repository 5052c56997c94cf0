import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csq import photon_stats as ps
from csq.errors import NoSignChangeError, NumericalPreconditionError

# P_2(n; 2.5), n = 0..5, and Q_M(s, lambda) from 30-digit summation (mpmath).
P2_ORACLE = [
    0.087550089049851194849,
    0.18016259821482983974,
    0.045599004713464163984,
    0.011632399161598001016,
    0.12117082459997917725,
    0.19449648360076657652,
]
Q_ORACLE = {
    (1, 0.5): -0.35183290718203023812,
    (1, 2.0): 0.17141495232211796825,
    (1, 7.0): 1.9385849935115695556,
    (2, 0.5): -0.58207881252066261686,
    (2, 2.0): 0.59838435872748422933,
    (2, 7.0): 2.8317389723307304589,
    (3, 0.5): -0.54991948875393752993,
    (3, 2.0): 0.26324029011013351148,
    (3, 7.0): 1.8247581701353529173,
}
# transition points by high-precision root finding (mpmath findroot)
ROOT_ORACLE = {1: 1.80977416377749211, 2: 1.14200357878404701, 3: 0.8444904720811217}


def test_distribution_against_high_precision():
    d = ps.distribution(2, 2.5)
    assert np.allclose(d.p[:6], P2_ORACLE, rtol=1e-13, atol=0)


@pytest.mark.parametrize("key", sorted(Q_ORACLE))
def test_mandel_against_high_precision(key):
    assert ps.mandel_q_series(*key) == pytest.approx(Q_ORACLE[key], rel=1e-11, abs=1e-13)


@pytest.mark.parametrize("s,bracket", [(1, (1.0, 3.0)), (2, (0.5, 6.0)), (3, (0.5, 8.0))])
def test_transition_points(s, bracket):
    assert ps.transition_point(s, bracket) == pytest.approx(ROOT_ORACLE[s], abs=1e-9)


def test_sector1_root_near_reference_value():
    assert abs(ps.transition_point(1) - 1.81) <= 0.005


def test_sector0_has_no_transition():
    with pytest.raises(NoSignChangeError):
        ps.transition_point(0)
    assert max(abs(ps.mandel_q_series(0, l)) for l in (0.1, 1.0, 5.0, 20.0)) < 1e-12


@pytest.mark.parametrize("lam", range(1, 11))
def test_cancellation_row(lam):
    assert ps.distribution(1, float(lam)).p[lam - 1] == 0.0


@pytest.mark.parametrize("lam", [0.1, 0.5, 1.0, 1.81, 3.0, 10.0, 50.0])
def test_closed_form_q_matches_series(lam):
    assert ps.mandel_q_series(1, lam) == pytest.approx(ps.mandel_q_closed_s1(lam), abs=1e-9)


@pytest.mark.parametrize("n,lam", [(0, 0.4), (3, 2.0), (7, 6.5), (20, 11.0)])
def test_sector1_probability_closed_form(n, lam):
    assert ps.distribution(1, lam).p[n] == pytest.approx(ps.poisson_corrected_s1(n, lam), rel=1e-12)


def test_large_lambda_limit_is_two():
    assert ps.mandel_q_closed_s1(50.0) == pytest.approx(2.0, abs=1e-6)
    assert ps.mandel_q_closed_s1(400.0) == pytest.approx(2.0, abs=1e-12)
    assert ps.mandel_q_series(1, 100.0) == pytest.approx(2.0, abs=1e-4)


def test_lambda_zero_and_negative():
    with pytest.raises(NumericalPreconditionError):
        ps.mandel_q_series(1, 0.0)
    with pytest.raises(ValueError):
        ps.distribution(1, -0.5)
    d = ps.distribution(2, 0.0)
    assert d.p[0] == 1.0 and d.p[1:].sum() == 0.0


def test_maxima_report_flags_discrepancy_at_lambda_one():
    rep = ps.maxima_report()
    assert rep[3]["computed"] == [0, 5] and rep[3]["agrees"]
    assert rep[10]["computed"] == [5, 14] and rep[10]["agrees"]
    # P_1(n; 1) peaks at n = 2; the reference maximum at n = 3 is not reproduced
    assert rep[1]["computed"] == [2] and not rep[1]["agrees"]


def test_csv_emitters():
    d = ps.distribution(0, 1.0, n_max=3)
    lines = d.to_csv().splitlines()
    assert lines[0] == "n,p"
    assert lines[1] == f"0,{math.exp(-1)!r}"
    assert ps.mandel_csv([1.0], [0.5]).splitlines() == ["lambda,q", "1.0,0.5"]


@settings(max_examples=25, deadline=None)
@given(s=st.integers(0, 3), lam=st.floats(0, 30))
def test_normalised_and_nonnegative(s, lam):
    d = ps.distribution(s, lam)
    assert np.all(d.p >= 0)
    assert abs(math.fsum(d.p) + d.tail_mass - 1) < 1e-12
    assert d.tail_mass < ps.TAIL_TOL


@settings(max_examples=20, deadline=None)
@given(lam=st.floats(0.01, 60))
def test_s0_is_poisson(lam):
    d = ps.distribution(0, lam)
    assert d.mean == pytest.approx(lam, rel=1e-12)
    assert d.variance == pytest.approx(lam, rel=1e-10)
