from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brf.aligned import UnsupportedSpace
from brf.catalog import load_model
from brf.curvature import DiagonalMetric, ricci_closed
from brf.legacy import (
    canonical_point,
    corrigendum_report,
    implicit_derivative,
    legacy_F,
    legacy_partials,
    legacy_partials_fd,
    legacy_point,
    legacy_solve,
    legacy_system,
    ratio_derivatives,
    ricci_ratios,
)
from brf.solver import canonical_metric

C1_TWO = ["su2xsu2_s1_11", "su3xsu3_so3", "su4xsu4_sp2"]


@pytest.mark.parametrize("sid", C1_TWO)
def test_canonical_point_formulas(sid):
    # c1 = 2: canonical point (x3, z1) = (2, 1)
    model = load_model(sid)
    lam = model.lambdas[0]
    assert canonical_point(model) == (F(2), F(1))
    assert legacy_F(F(2), F(1), model) == 0
    fx, fz = legacy_partials(model, F(2), F(1))
    assert fx == 16 * (1 - lam)
    assert fz == 16 - 10 * lam
    assert implicit_derivative(model, F(1)) == -(8 - 5 * lam) / (8 * (1 - lam))


def test_su3_numbers():
    model = load_model("su3xsu3_so3")
    assert legacy_partials(model, F(2), F(1)) == (F(44, 3), F(91, 6))
    d = ratio_derivatives(model, F(1))
    assert d["x3_prime"] == F(-91, 88)
    assert d["r13_prime"] == F(45, 2662)
    assert abs(float(d["r13_prime"]) - d["r13_prime_fd"]) < 1e-7


def test_so8_numbers():
    model = load_model("so8xso7_g2")
    assert canonical_point(model) == (F(11, 5), F(5, 6))
    assert legacy_partials(model, F(11, 5), F(5, 6)) == (F(847, 90), F(1994, 125))
    d = ratio_derivatives(model, F(5, 6))
    assert d["x3_prime"] == F(-35892, 21175)
    assert d["r12_prime"] == F(-864, 46585)
    # r13' is positive; the finite-difference slope along the curve confirms the sign
    assert d["r13_prime"] == F(2160, 41503)
    assert abs(float(d["r13_prime"]) - d["r13_prime_fd"]) < 1e-7
    assert abs(float(d["r12_prime"]) - d["r12_prime_fd"]) < 1e-7


@given(st.floats(min_value=0.5, max_value=4.0), st.floats(min_value=0.2, max_value=5.0))
def test_partials_match_finite_differences(x3, z1):
    model = load_model("su3xsu3_so3")
    fx, fz = legacy_partials(model, x3, z1)
    gx, gz = legacy_partials_fd(model, x3, z1)
    assert abs(fx - gx) < 1e-7 * max(1.0, abs(fx))
    assert abs(fz - gz) < 1e-7 * max(1.0, abs(fz))


@pytest.mark.parametrize("z1", [0.3, 0.8, 1.5, 4.0])
def test_curve_slope_matches_implicit_derivative(z1):
    model = load_model("so8xso7_g2")
    h = 1e-5
    slope = (legacy_solve(model, z1 + h) - legacy_solve(model, z1 - h)) / (2 * h)
    assert abs(slope - implicit_derivative(model, z1)) < 1e-5


@pytest.mark.parametrize("z1", [0.5, 1.0, 2.0])
def test_r12_constant_for_c1_two(z1):
    model = load_model("su3xsu3_so3")
    assert np.isclose(ricci_ratios(model, legacy_point(model, z1))["r12"], 1.0, atol=1e-12)


@pytest.mark.parametrize("z1", [0.4, 5 / 6, 3.0])
def test_ratios_agree_with_closed_ricci(z1):
    model = load_model("so8xso7_g2")
    pt = legacy_point(model, z1)
    space = model.at(z1)
    m = DiagonalMetric(z1, *(float(v) for v in pt.x))
    op = ricci_closed(space, m).operator(m.weights(space))
    r = ricci_ratios(model, m)
    sl = space.slices
    assert np.isclose(r["r1"], op[sl["p1"].start, sl["p1"].start], atol=1e-12)
    assert np.isclose(r["r2"], op[sl["p2"].start, sl["p2"].start], atol=1e-12)
    assert np.isclose(r["r3"], op[sl["p3"].start, sl["p3"].start], atol=1e-12)


def test_legacy_point_is_g0_at_canonical_z1():
    model = load_model("so8xso7_g2")
    assert legacy_point(model, F(5, 6)).x == canonical_metric(F(5, 6)).x


def test_corrigendum_rows():
    model = load_model("su3xsu3_so3")
    rows = corrigendum_report(model, [F(1, 2), F(1), F(2)])
    by_z = {r["z1"]: r for r in rows}
    assert by_z[F(1)]["legacy_residual"] < 1e-10
    assert by_z[F(1)]["h2_p3_delta"] < 1e-14
    for z in (F(1, 2), F(2)):
        assert by_z[z]["legacy_residual"] > 1e-3
        assert by_z[z]["h2_p3_delta"] > 1e-2
    assert all(r["corrected_gk"] == (F(1), F(1), F(2)) for r in rows)


@pytest.mark.parametrize("sid", ["su3xsu3_u2", "su2xsu3_s1_21"])
def test_unsupported_spaces(sid):
    with pytest.raises(UnsupportedSpace):
        legacy_system(load_model(sid))
