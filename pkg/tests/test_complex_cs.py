import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csq import complex_cs as cc
from csq.errors import TruncationError

# N_s(lambda) by 30-digit summation of the defining series (mpmath).
NORM_ORACLE = {
    (2, 0.5): 0.96122127070012814685,
    (2, 3.0): 14.085536923187667741,
    (2, 12.0): 162082.79141900392081,
    (3, 0.5): 0.92736710403346148018,
    (3, 3.0): 13.335536923187667741,
    (3, 12.0): 154438.79141900392081,
}

# lower-symbol factor q_check / q by 30-digit summation of the 1F1 series (mpmath).
FACTOR_ORACLE = {
    (1, 0.25): 1.9670942163136241406,
    (1, 2.0): 1.1855612525908627827,
    (1, 9.0): 1.0001235470263154973,
    (2, 0.25): 2.796053567373875801,
    (2, 2.0): 1.3711225051817255654,
    (2, 9.0): 1.0082886131543987064,
    (3, 0.25): 3.3989575341442254613,
    (3, 2.0): 1.6352716231964282303,
    (3, 9.0): 1.092418827402118107,
}


@pytest.mark.parametrize("key", sorted(NORM_ORACLE))
def test_normalization_against_high_precision(key):
    assert cc.normalization(*key) == pytest.approx(NORM_ORACLE[key], rel=1e-13)


@pytest.mark.parametrize("lam", np.linspace(0, 25, 26))
def test_normalization_closed_forms(lam):
    assert cc.normalization(0, lam) == pytest.approx(math.exp(lam), rel=1e-12)
    assert cc.normalization(1, lam) == pytest.approx(math.exp(lam) - lam, rel=1e-12)


@pytest.mark.parametrize("key", sorted(FACTOR_ORACLE))
def test_lower_symbol_factor_series(key):
    assert cc.lower_symbol_factor_series(*key) == pytest.approx(FACTOR_ORACLE[key], rel=1e-12)


@pytest.mark.parametrize("s", [0, 1, 2, 3])
def test_hermite_gram_is_diagonal(s):
    G = cc.hermite_gram(s, 6)
    d = np.array([math.factorial(s) * math.factorial(s + n) for n in range(7)], dtype=float)
    assert np.max(np.abs(G - np.diag(d)) / np.sqrt(np.outer(d, d))) < 1e-10


def test_sector_config_validation():
    with pytest.raises(ValueError):
        cc.SectorConfig(-1, 10)
    with pytest.raises(ValueError):
        cc.SectorConfig(0, 1)


def test_position_matrix_entry_sector_two():
    q, _ = cc.position_momentum(cc.SectorConfig(2, 4))
    assert q.matrix[0, 1].real == pytest.approx(math.sqrt(1.5), abs=1e-15)


def test_ladder_adjoint_is_exact():
    a, ad = cc.ladder_operators(cc.SectorConfig(3, 12))
    assert np.array_equal(ad.matrix, a.matrix.conj().T)


@pytest.mark.parametrize("s", [0, 1, 2, 3])
def test_commutator_structure(s):
    comm, rep = cc.commutator_defect(cc.SectorConfig(s, 40))
    assert rep["interior_defect"] < 1e-12
    assert rep["corner_entry"] == -(s + 39)
    assert rep["ground_entry"] == 1 + s
    diag = cc.commutator_diagonal_exact(cc.SectorConfig(s, 40))
    assert diag[0] == 1 + s and all(v == 1 for v in diag[1:-1]) and diag[-1] == -(s + 39)


@pytest.mark.parametrize("s", [0, 1, 2, 3])
def test_hamiltonian_spectra(s):
    h_cs, h_ans = cc.hamiltonians(cc.SectorConfig(s, 40))
    assert np.array_equal(np.diag(h_cs.matrix).real, np.arange(40) + 2.0 * s + 1)
    ev = cc.interior_spectrum(h_ans)
    assert len(ev) == 36
    assert np.max(np.abs(ev - cc.ansatz_levels(s, 36))) < 1e-8
    assert ev[1] - ev[0] == pytest.approx(s / 2 + 1, abs=1e-8)
    assert np.all(np.diff(ev[1:]) == pytest.approx(1.0, abs=1e-8))


def test_full_ansatz_spectrum_contains_the_corner_artefact():
    D, s = 14, 1
    _, h_ans = cc.hamiltonians(cc.SectorConfig(s, D))
    full = np.linalg.eigvalsh(h_ans.matrix)
    assert np.any(np.isclose(full, (s + D - 1) / 2))


@pytest.mark.parametrize("s", [0, 1, 2])
@pytest.mark.parametrize("D", [3, 10])
def test_closed_forms_match_quantization(s, D):
    cfg = cc.SectorConfig(s, D)
    a, ad = cc.ladder_operators(cfg)
    q, p = cc.position_momentum(cfg)
    h_cs, _ = cc.hamiltonians(cfg)
    for op, f in ((a, cc.Z), (ad, cc.ZBAR), (q, cc.Q_OBS), (p, cc.P_OBS), (h_cs, cc.MOD_Z_SQ)):
        assert np.max(np.abs(cc.quantize(cfg, f).matrix - op.matrix)) < 1e-9
        assert np.max(np.abs(cc.quantize_polar(cfg, f).matrix - op.matrix)) < 1e-9


@pytest.mark.parametrize("s", [0, 1, 2, 3])
def test_identity_is_resolved(s):
    for D in (2, 20):
        one = cc.quantize(cc.SectorConfig(s, D), {(0, 0): 1.0}).matrix
        assert np.max(np.abs(one - np.eye(D))) < 1e-12


def test_selection_rule_zero_entries():
    A = cc.quantize(cc.SectorConfig(1, 8), {(2, 0): 1.0}).matrix
    m, n = np.nonzero(np.abs(A) > 1e-14)
    assert np.all(m - n == -2)


def test_coherent_state_eigenvector_only_for_s0():
    assert cc.annihilation_residual(0, 0.8 + 0.3j) < 1e-13
    assert cc.annihilation_residual(1, 0.8 + 0.3j) > 1e-3


def test_default_dimension_holds_moderate_z():
    # D = 40 keeps the tail below 1e-14 up to |z| of about 2.7
    for s in range(4):
        assert cc.coherent_state(s, 2.5).tail < cc.SERIES_TOL


def test_truncation_error_names_needed_dimension():
    with pytest.raises(TruncationError, match="D"):
        cc.coherent_state(1, 5.0, D=40)
    st_ = cc.coherent_state(1, 5.0, D=cc.required_dimension(1, 25.0) + 1)
    assert st_.tail < cc.SERIES_TOL


@settings(max_examples=30, deadline=None)
@given(s=st.integers(0, 3), r=st.floats(0, 3.5), th=st.floats(0, 2 * math.pi))
def test_coherent_state_norm(s, r, th):
    z = r * complex(math.cos(th), math.sin(th))
    cs = cc.coherent_state(s, z, D=cc.required_dimension(s, r * r) + 1)
    assert abs(np.sum(np.abs(cs.coeffs) ** 2) - (1 - cs.tail)) < 1e-13


@settings(max_examples=20, deadline=None)
@given(s=st.integers(0, 4), D=st.integers(2, 30))
def test_operators_hermitian(s, D):
    cfg = cc.SectorConfig(s, D)
    for op in (*cc.position_momentum(cfg), *cc.hamiltonians(cfg)):
        assert op.matrix.shape == (D, D)
        assert op.is_hermitian(1e-12)


@settings(max_examples=25, deadline=None)
@given(r=st.floats(0.05, 4.0), th=st.floats(0, 2 * math.pi))
def test_lower_symbol_s1_closed_form(r, th):
    z = r * complex(math.cos(th), math.sin(th))
    ls = cc.lower_symbols(cc.SectorConfig(1, cc.DEFAULT_D), z)
    assert abs(ls.q_matrix - cc.q_check_closed_s1(z)) < 1e-9
    assert abs(ls.q_series - ls.q_matrix) < 1e-9


def test_lower_symbol_s0_is_identity_and_large_z_limit():
    z = 1.3 - 0.4j
    ls = cc.lower_symbols(cc.SectorConfig(0, cc.DEFAULT_D), z)
    assert ls.q_matrix == pytest.approx(math.sqrt(2) * z.real, abs=1e-12)
    assert ls.p_matrix == pytest.approx(math.sqrt(2) * z.imag, abs=1e-12)
    big = cc.lower_symbols(cc.SectorConfig(1, cc.DEFAULT_D), 6.0)
    assert big.q_matrix / (math.sqrt(2) * 6.0) == pytest.approx(1.0, abs=1e-12)


def test_operator_json_roundtrip():
    q, _ = cc.position_momentum(cc.SectorConfig(2, 5))
    back = cc.TruncatedOperator.from_dict(q.to_dict())
    assert np.array_equal(back.matrix, q.matrix)
    assert set(q.to_dict()) >= {"s", "D", "label", "re", "im"}
