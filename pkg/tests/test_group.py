import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brf.group import (
    abelian,
    brf_group_diagonal,
    brf_group_equations,
    cartan_scan,
    casimir_identity_exact,
    group_metric,
    hb_codifferential,
    hb_squared,
    hb_squared_bruteforce,
    hull_check,
    identity_defect,
    ricci_group,
    ricci_group_bruteforce,
    su2,
    su2_su2,
    verify_rigidity,
)
from brf.liealg import ParameterError, build_classical

entries = st.floats(min_value=0.2, max_value=5.0)
ALGS = {"su2": su2(), "su2+su2": su2_su2(), "su3": build_classical("su", 3)}


def _metric(name, xs):
    alg = ALGS[name]
    return group_metric(alg, (list(xs) * alg.dim)[: alg.dim])


@given(st.sampled_from(sorted(ALGS)), st.lists(entries, min_size=8, max_size=8))
def test_closed_formulas_match_oracle(name, xs):
    m = _metric(name, xs)
    assert np.abs(ricci_group(m) - ricci_group_bruteforce(m)).max() < 1e-10
    assert np.abs(hb_squared(m) - hb_squared_bruteforce(m)).max() < 1e-10


@given(st.sampled_from(sorted(ALGS)), st.lists(entries, min_size=8, max_size=8))
def test_signed_identity(name, xs):
    # ric - H_b^2 / 4 = -(1/4) (BRF1 left-hand side)
    m = _metric(name, xs)
    assert identity_defect(m, -1.0) < 1e-10


def test_plus_sign_identity_fails_off_solutions():
    m = group_metric(su2(), [2.0, 1.0, 1.0])
    assert identity_defect(m, +1.0) > 0.1


def test_bi_invariant_is_brf():
    for alg in ALGS.values():
        m = group_metric(alg)
        assert np.abs(brf_group_equations(m)).max() < 1e-12
        assert np.abs(hb_codifferential(m)).max(initial=0) < 1e-12


def test_berger_metric_is_not_brf():
    m = group_metric(su2(), [2.0, 1.0, 1.0])
    assert np.abs(brf_group_equations(m)).max() > 0.1
    assert not hull_check(np.array([2.0, 1.0, 1.0]))["equality"]


@given(st.lists(entries, min_size=6, max_size=6))
def test_diagonal_equations_agree(xs):
    m = group_metric(su2_su2(), xs)
    assert np.allclose(np.diag(brf_group_equations(m)), brf_group_diagonal(m), atol=1e-10)


@given(st.lists(entries, min_size=3, max_size=3))
def test_ricci_of_su2_diagonal(xs):
    m = group_metric(su2(), xs)
    r = ricci_group(m)
    assert np.allclose(r, np.diag(np.diag(r)), atol=1e-12)


@pytest.mark.parametrize("alg", [su2(), build_classical("su", 3), build_classical("so", 5)])
def test_casimir_identity_exact(alg):
    assert casimir_identity_exact(alg)


@pytest.mark.parametrize("alg", [su2(), su2_su2()])
def test_rigidity(alg):
    rep = verify_rigidity(alg, trials=60, seed=1)
    assert rep["status"] == "ok"
    assert rep["solutions_found"] == 1
    assert np.allclose(rep["solutions"][0], 1.0, atol=1e-8)
    assert rep["converged"] + rep["escaped"] + rep["diverged"] == 60


def test_abelian_is_degenerate():
    rep = verify_rigidity(abelian(3), trials=5)
    assert rep["degenerate"] and rep["status"] == "degenerate"


@pytest.mark.parametrize("scale", [(1.0, 1.0), (2.0, 0.5)])
def test_cartan_scan_roots(scale):
    roots = cartan_scan(su2_su2(), scale)
    for found, z in zip(roots, scale):
        assert np.allclose(sorted(found), [-z, z], atol=1e-10)


def test_metric_validation():
    with pytest.raises(ParameterError):
        group_metric(su2(), [1.0, -1.0, 1.0])
    with pytest.raises(ParameterError):
        group_metric(su2(), [1.0, 1.0])
