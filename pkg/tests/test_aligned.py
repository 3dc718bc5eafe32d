from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brf import exact
from brf.aligned import (
    NotAligned,
    SpaceConstants,
    build_model,
    embedding_from_vectors,
)
from brf.catalog import load_model
from brf.embeddings import circle_su2_su2
from brf.liealg import ParameterError, build_classical

positive_fracs = st.fractions(min_value=F(1, 20), max_value=20, max_denominator=50)
c1_values = st.sampled_from([F(2), F(11, 6), F(7, 6), F(10, 7), F(5, 4), F(71, 56)])


@given(c1_values, positive_fracs)
def test_normalizations_exact(c1, z1):
    c = SpaceConstants.normalized(c1, z1)
    assert c.z2 == 1 / (c1 - 1)
    assert c.y1 == 1 and c.y2 == -1 / (c1 - 1)
    assert c.A3 == -z1
    assert c.B3 == z1 * (z1 + 1) / c1
    assert c.C3 == c.B4 == (z1 + 1) / c1
    # Q = y1 B1 + y2 B2 restricts to zero on k
    c2 = c1 / (c1 - 1)
    assert c.y1 / c1 + c.y2 / c2 == 0


def test_nonpositive_z1_rejected():
    with pytest.raises(ParameterError):
        SpaceConstants.normalized(F(2), 0)
    with pytest.raises(ParameterError):
        SpaceConstants.normalized(F(2), -1.0)


@pytest.mark.parametrize("z1", [0.1, 0.5, 1.0, 3.0])
def test_adapted_basis_is_gb_orthonormal(small_model, z1):
    space = small_model.at(z1)
    assert np.allclose(space.gb_gram(), np.eye(space.gb_gram().shape[0]), atol=1e-12)


@pytest.mark.parametrize("z1", [0.25, 1.0, 4.0])
def test_q_form_blocks(small_model, z1):
    space = small_model.at(z1)
    q, sl, c = space.q_adapted, space.slices, space.const
    assert np.abs(q[sl["k"], sl["k"]]).max(initial=0) < 1e-12
    d3 = space.dims[2]
    assert np.allclose(q[sl["k"], sl["p3"]], -c.C3 / np.sqrt(c.B3 * c.B4) * np.eye(d3), atol=1e-12)
    d1 = space.dims[0]
    assert np.allclose(q[sl["p1"], sl["p1"]], -(c.y1 / c.z1) * np.eye(d1), atol=1e-12)


def test_structure_constants_antisymmetric(small_model):
    c = small_model.at(0.7).structure
    assert np.abs(c + c.transpose(1, 0, 2)).max() < 1e-12


def test_circle_12_is_swapped():
    model = build_model(circle_su2_su2(1, 2))
    assert model.alignment.swapped
    assert model.c1 == F(5, 4)
    assert model.c2 == 5


@pytest.mark.parametrize("p,q", [(1, 1), (2, 1), (3, 1), (3, 2)])
def test_circle_constants(p, q):
    # B1 restricted to the circle scales with p^2, B2 with q^2
    model = build_model(circle_su2_su2(p, q))
    hi, lo = max(p, q), min(p, q)
    assert model.c1 == F(hi * hi + lo * lo, hi * hi)
    assert 1 / model.c1 + 1 / model.c2 == 1


def test_circle_rejects_nonpositive_weights():
    with pytest.raises(ParameterError):
        circle_su2_su2(0, 1)


def test_non_aligned_torus():
    su3 = build_classical("su", 3)
    h1, h2 = su3.labels.index("h1"), su3.labels.index("h2")
    vec = [[F(0)] * 2 for _ in range(16)]
    vec[h1][0], vec[8 + h1][0] = F(1), F(1)
    vec[h2][1], vec[8 + h2][1] = F(1), F(2)
    emb = embedding_from_vectors("torus", su3, su3, exact.qmat(vec))
    with pytest.raises(NotAligned):
        build_model(emb)


def test_alignment_certificate_and_lambdas(any_model):
    al = any_model.alignment
    cert = al.certificate()
    assert cert["reciprocal_sum_is_one"] and cert["lambda_times_c_matches"]
    for lam, (c1l, c2l) in zip(al.lambdas, al.c_il):
        assert c1l < 1 and c2l < 1
        assert c1l + c2l == lam * (al.c1 + al.c2) or lam == 0


def test_isotropy_assumption():
    assert load_model("su3xsu3_so3").assumption["holds"]
    assert load_model("so8xso7_g2").assumption["holds"]
    # the weighted circle in SU(2)xSU(3) has a trivial summand in p2
    assert not load_model("su2xsu3_s1_21").assumption["holds"]


def test_non_scalar_casimir_reported_as_none():
    m = load_model("su2xsu3_s1_21")
    assert m.kappa1 == F(1, 2)
    assert m.kappa2 is None
