from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brf.catalog import load_model
from brf.config import MultistartConfig
from brf.curvature import DiagonalMetric, hq_form
from brf.liealg import ParameterError
from brf.solver import (
    brf_residual,
    brf_residual_parts,
    canonical_metric,
    canonical_solution,
    expected_canonical_spectrum,
    gk_coordinates,
    homothety_invariants,
    positivity_certificate,
    ricci_spectrum_exact,
    solve_corrected,
    solve_x1,
    solve_x2,
    uniqueness_factor,
)

rational_z = st.fractions(min_value=F(1, 10), max_value=10, max_denominator=30)
kappas = st.sampled_from([F(1, 2), F(1, 3), F(2, 5), F(1, 4), F(15, 56)])


def test_canonical_metric_values():
    g0 = canonical_metric(F(1, 2))
    assert g0.x == (F(2), F(1), F(3))


@given(rational_z)
def test_canonical_is_brf(z1):
    sol = canonical_solution(load_model("su3xsu3_so3"), z1)
    assert sol.residual < 1e-10
    assert sol.gk_coordinates == (F(1), F(1), F(2))


def test_canonical_residual_parts(small_model):
    space = small_model.at(0.3)
    parts = brf_residual_parts(space, canonical_metric(0.3))
    assert set(parts) == {"ricci", "closed", "coclosed"}
    assert max(parts.values()) < 1e-10


@pytest.mark.parametrize("sid,triple", [("su2xsu2_s1_21", (1, 4, 5)), ("so8xso7_g2", (1, F(6, 5), F(11, 5)))])
def test_gk_triple(sid, triple):
    # (1, 1/(c1-1), c1/(c1-1)) with respect to the standard metric
    for z1 in (F(1, 3), F(7, 2)):
        assert canonical_solution(load_model(sid), z1).gk_coordinates == tuple(F(v) for v in triple)


def test_gk_numeric_matches_exact(small_model):
    sol = canonical_solution(small_model, F(3, 4))
    assert np.allclose([float(v) for v in sol.gk_coordinates], sol.gk_numeric, atol=1e-12)


@given(rational_z, kappas)
def test_root_formulas_at_canonical_x3(z1, kappa):
    x3 = (z1 + 1) / z1
    assert solve_x1(x3, z1, kappa) == 1 / z1
    assert solve_x2(x3, z1, kappa) == 1


@pytest.mark.parametrize("kappa", [F(0), F(-1, 2), F(3, 5)])
def test_root_formula_rejects_kappa(kappa):
    with pytest.raises(ParameterError):
        solve_x1(2, 1, kappa)


def test_normal_metric_is_not_brf():
    space = load_model("su3xsu3_so3").at(1.0)
    assert brf_residual(space, DiagonalMetric(1.0, 1.0, 1.0, 1.0)) > 0.01


@given(st.floats(min_value=0.2, max_value=5.0))
def test_residual_scale_covariance(c):
    # (c g, c H) has the residual operator of (g, H) divided by c
    space = load_model("su3xsu3_so3").at(0.7)
    m = DiagonalMetric(0.7, 1.1, 0.9, 2.3)
    h = hq_form(space)
    base = brf_residual_parts(space, m, h)["ricci"]
    scaled = brf_residual_parts(space, m.scaled(c), h.scale(c))["ricci"]
    assert np.isclose(scaled, base / c, rtol=1e-9)
    assert brf_residual(space, canonical_metric(0.7).scaled(c), h.scale(c)) < 1e-10


def test_homothety_invariants_constant_in_z1():
    model = load_model("su3xsu3_so3")
    inv = {homothety_invariants(model.at(z), canonical_metric(z)) for z in (0.2, 1.0, 6.0)}
    assert len(inv) == 1


def test_homothety_invariants_distinguish_normal_metric():
    space = load_model("su3xsu3_so3").at(1.0)
    a = homothety_invariants(space, canonical_metric(1.0))
    b = homothety_invariants(space, DiagonalMetric(1.0, 1.0, 1.0, 1.0))
    assert a != b


@given(
    rational_z,
    st.fractions(min_value=F(1, 50), max_value=50, max_denominator=60),
    st.fractions(min_value=F(1, 50), max_value=50, max_denominator=60),
    st.fractions(min_value=F(1, 50), max_value=50, max_denominator=60),
)
def test_uniqueness_factor_positive(z1, x1, x2, x3):
    for sid in ("su3xsu3_so3", "so8xso7_g2", "g2xsp2_su2"):
        model = load_model(sid)
        for lam in model.lambdas:
            assert uniqueness_factor(model, lam, x1, x2, x3, z1) > 0


def test_certificate_holds(any_model):
    cert = positivity_certificate(any_model, F(1, 2))
    assert cert["holds"]
    assert all(r["positive"] for r in cert["blocks"])


def test_multistart_finds_only_canonical():
    sols, info = solve_corrected(load_model("su2xsu2_s1_11"), F(1, 2), MultistartConfig(starts=30, seed=3))
    assert len(sols) == 1
    assert info["search"]["other_solutions"] == []
    assert info["search"]["converged"] > 0


def test_non_scalar_casimir_still_solved():
    sols, info = solve_corrected(load_model("su2xsu3_s1_21"), F(2))
    assert sols[0].residual < 1e-10
    assert info["certificate"]["holds"]


@pytest.mark.parametrize("z1", [F(1, 10), F(1), F(10)])
def test_spectrum_exact(small_model, z1):
    assert ricci_spectrum_exact(small_model, z1) == expected_canonical_spectrum(small_model)


def test_gk_coordinates_float_metric():
    space = load_model("su3xsu3_so3").at(0.5)
    y = gk_coordinates(space, canonical_metric(0.5))
    assert np.allclose(y, (1, 1, 2))
