"""Constructors for concrete embeddings K -> G1 x G2.

All embeddings are rational: subalgebras are given by integer (or Gaussian
integer) matrices inside the defining realizations of the factors, and
coordinates are solved exactly.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import lcm

import flint
import numpy as np

from . import exact
from .aligned import Embedding, IdealBlock, MisuseError
from .liealg import (
    ConstructionError,
    ParameterError,
    StructureAlgebra,
    build_classical,
    build_g2,
    matrix_algebra,
    realify,
    three_form_stabilizer,
)


def _abelian(dim: int, name: str) -> StructureAlgebra:
    return StructureAlgebra(
        name=name,
        labels=tuple(f"t{i+1}" for i in range(dim)),
        c_num=np.zeros((dim, dim, dim), dtype=np.int64),
        c_den=1,
        ideals=((0, dim),),
    )


def _unit(n: int, i: int, scale=1) -> flint.fmpq_mat:
    m = flint.fmpq_mat(n, 1)
    m[i, 0] = exact.to_fmpq(scale)
    return m


def coords_in(g: StructureAlgebra, mats: np.ndarray, den: int = 1) -> flint.fmpq_mat:
    if g.realization is None:
        raise MisuseError(f"{g.name} has no matrix realization")
    return g.realization.coords(mats, den)


def subgroup_embedding(
    name: str,
    g1: StructureAlgebra,
    g2: StructureAlgebra,
    k: StructureAlgebra,
    emb1: flint.fmpq_mat,
    emb2: flint.fmpq_mat,
    blocks,
) -> Embedding:
    emb = Embedding(name, g1, g2, k, emb1, emb2, tuple(blocks))
    emb.validate()
    return emb


# ---------------------------------------------------------------------------
# circles


def circle_su2_su2(p: int, q: int) -> Embedding:
    """S^1_{p,q} = {(exp(p t H), exp(q t H))} inside SU(2) x SU(2)."""
    if p <= 0 or q <= 0:
        raise ParameterError("p and q must be positive integers")
    su2 = build_classical("su", 2)
    h = su2.labels.index("h1")
    k = _abelian(1, "u(1)")
    return subgroup_embedding(
        f"su2xsu2_s1_{p}{q}", su2, su2, k, _unit(3, h, p), _unit(3, h, q), [IdealBlock(0, 1, True)]
    )


def circle_su2_su3(a: int = 2, b: int = 1) -> Embedding:
    """Weighted circle (a i diag(1,-1), b i diag(1,-1,0)) inside SU(2) x SU(3)."""
    su2 = build_classical("su", 2)
    su3 = build_classical("su", 3)
    k = _abelian(1, "u(1)")
    return subgroup_embedding(
        f"su2xsu3_s1_{a}{b}",
        su2,
        su3,
        k,
        _unit(3, su2.labels.index("h1"), a),
        _unit(8, su3.labels.index("h1"), b),
        [IdealBlock(0, 1, True)],
    )


# ---------------------------------------------------------------------------
# diagonal embeddings


def diagonal(name: str, g: StructureAlgebra, k: StructureAlgebra, emb: flint.fmpq_mat, blocks) -> Embedding:
    """Delta K inside G x G."""
    return subgroup_embedding(name, g, g, k, emb, emb, blocks)


def _complex_to_realified(mats) -> np.ndarray:
    return np.array([realify(np.asarray(m)) for m in mats])


def so_in_su(n: int) -> tuple[StructureAlgebra, StructureAlgebra, flint.fmpq_mat]:
    """so(n) (real matrices) inside su(n)."""
    so = build_classical("so", n)
    su = build_classical("su", n)
    mats = _complex_to_realified(so.realization.mats.astype(complex))
    return so, su, coords_in(su, mats)


def pad_block(mats: np.ndarray, size: int) -> np.ndarray:
    """Upper-left block inclusion of square matrices."""
    d, n, _ = mats.shape
    out = np.zeros((d, size, size), dtype=mats.dtype)
    out[:, :n, :n] = mats
    return out


def su3_u2() -> tuple[StructureAlgebra, StructureAlgebra, flint.fmpq_mat, list[IdealBlock]]:
    """u(2) = s(u(2) + u(1)) inside su(3): center first, then su(2)."""
    su3 = build_classical("su", 3)
    z = np.diag([1j, 1j, -2j])
    m = []
    for j, kk in [(0, 1)]:
        a = np.zeros((3, 3), dtype=complex)
        a[j, kk], a[kk, j] = 1, -1
        s = np.zeros((3, 3), dtype=complex)
        s[j, kk] = s[kk, j] = 1j
        m += [a, s]
    m.append(np.diag([1j, -1j, 0]))
    mats = _complex_to_realified([z] + m)
    k = matrix_algebra(mats, ["z", "a12", "s12", "h1"], "u(2)")
    return k, su3, coords_in(su3, mats), [IdealBlock(0, 1, True), IdealBlock(1, 4)]


def sp_in_su(n: int) -> tuple[StructureAlgebra, StructureAlgebra, flint.fmpq_mat]:
    sp = build_classical("sp", n)
    su = build_classical("su", 2 * n)
    return sp, su, coords_in(su, sp.realization.mats, sp.realization.den)


# ---------------------------------------------------------------------------
# G2 inside SO(7) inside SO(8)


def g2_in_so7_so8() -> Embedding:
    g2 = build_g2()
    so7 = build_classical("so", 7)
    so8 = build_classical("so", 8)
    mats = g2.realization.mats
    e7 = coords_in(so7, mats, g2.realization.den)
    e8 = coords_in(so8, pad_block(mats, 8), g2.realization.den)
    return subgroup_embedding("so8xso7_g2", so8, so7, g2, e8, e7, [IdealBlock(0, 14)])


def so_in_su_and_so(n: int) -> Embedding:
    """SO(n) inside SU(n) x SO(n+1)."""
    so, su, e1 = so_in_su(n)
    big = build_classical("so", n + 1)
    e2 = coords_in(big, pad_block(so.realization.mats, n + 1))
    return subgroup_embedding(f"su{n}xso{n+1}_so{n}", su, big, so, e1, e2, [IdealBlock(0, so.dim)])


# ---------------------------------------------------------------------------
# Sp(2) = Spin(5) inside SO(10) x SU(4)

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "1": np.eye(2, dtype=complex),
}


def euclidean_gammas() -> list[np.ndarray]:
    """Five Hermitian 4x4 matrices with gamma_a gamma_b + gamma_b gamma_a = 2 delta_ab."""
    p = _PAULI
    return [
        np.kron(p["x"], p["1"]),
        np.kron(p["y"], p["1"]),
        np.kron(p["z"], p["x"]),
        np.kron(p["z"], p["y"]),
        np.kron(p["z"], p["z"]),
    ]


def spin5_in_so10_su4() -> Embedding:
    so5 = build_classical("so", 5)
    so10 = build_classical("so", 10)
    su4 = build_classical("su", 4)
    # adjoint of so(5) in its orthonormal E_jk basis is a map into so(10)
    ad = np.rint(so5.ad_basis).astype(np.int64)
    if not np.allclose(ad, so5.ad_basis) or np.any(ad + np.transpose(ad, (0, 2, 1))):
        raise ConstructionError("adjoint matrices of so(5) are not integral and skew")
    e1 = coords_in(so10, ad)
    gam = euclidean_gammas()
    spin = []
    for j, kk in itertools.combinations(range(5), 2):
        spin.append(gam[j] @ gam[kk])  # twice the spin generator
    spin_r = _complex_to_realified(spin)
    try:
        e2 = coords_in(su4, spin_r, 2)
        emb = Embedding("so10xsu4_sp2", so10, su4, so5, e1, e2, (IdealBlock(0, 10),))
        emb.validate()
    except MisuseError:
        e2 = coords_in(su4, -spin_r, 2)
        emb = Embedding("so10xsu4_sp2", so10, su4, so5, e1, e2, (IdealBlock(0, 10),))
        emb.validate()
    return emb


# ---------------------------------------------------------------------------
# principal su(2) inside G2 x Sp(2)


def _monomials(d: int) -> list[tuple[int, int, int]]:
    return [(a, b, d - a - b) for a in range(d, -1, -1) for b in range(d - a, -1, -1)]


def polynomial_rep(d: int) -> list[flint.fmpq_mat]:
    """so(3) (basis E12, E13, E23) acting on homogeneous degree-d polynomials.

    (rho(A) f)(v) = -grad f(v) . (A v), a Lie algebra homomorphism.
    """
    mons = _monomials(d)
    index = {m: i for i, m in enumerate(mons)}
    so3 = build_classical("so", 3)
    out = []
    for a in so3.realization.mats:
        m = flint.fmpq_mat(len(mons), len(mons))
        for col, mon in enumerate(mons):
            # d/dx_i of the monomial times -(A v)_i = -sum_j A_ij x_j
            for i in range(3):
                if mon[i] == 0:
                    continue
                coeff = mon[i]
                base = list(mon)
                base[i] -= 1
                for j in range(3):
                    if a[i, j] == 0:
                        continue
                    new = base.copy()
                    new[j] += 1
                    row = index[tuple(new)]
                    m[row, col] += -coeff * int(a[i, j])
        out.append(m)
    return out


def laplacian_matrix(d: int) -> flint.fmpq_mat:
    src = _monomials(d)
    dst = {m: i for i, m in enumerate(_monomials(d - 2))}
    lap = flint.fmpq_mat(len(dst), len(src))
    for col, mon in enumerate(src):
        for i in range(3):
            if mon[i] >= 2:
                new = list(mon)
                new[i] -= 2
                lap[dst[tuple(new)], col] += mon[i] * (mon[i] - 1)
    return lap


@lru_cache(maxsize=None)
def harmonic_rep(d: int) -> tuple[flint.fmpq_mat, ...]:
    """Irreducible (2d+1)-dimensional so(3)-representation on harmonic polynomials."""
    rep = polynomial_rep(d)
    if d < 2:
        return tuple(rep)
    basis = exact.nullspace(laplacian_matrix(d))
    if basis.ncols() != 2 * d + 1:
        raise ConstructionError("unexpected dimension of harmonic polynomials")
    return tuple(exact.solve_in_span(basis, r * basis) for r in rep)


def _to_int_mats(mats) -> tuple[np.ndarray, int]:
    den = 1
    for m in mats:
        den = lcm(den, int(m.numer_denom()[1]))
    out = np.array([[[int(v * den) for v in row] for row in exact.to_fractions(m)] for m in mats], dtype=object)
    return exact.to_int64(out), den


def invariant_three_form(rep: tuple[flint.fmpq_mat, ...]) -> np.ndarray:
    """Primitive integer 3-form (dense antisymmetric tensor) annihilated by rep."""
    n = rep[0].nrows()
    trip = list(itertools.combinations(range(n), 3))
    ints, den = _to_int_mats(rep)
    rows = []
    for a in ints:
        # A.phi on the basis 3-forms e^{ijk}, coefficient at (p<q<r)
        block = np.zeros((len(trip), len(trip)), dtype=object)
        for col, t in enumerate(trip):
            phi = np.zeros((n, n, n), dtype=np.int64)
            for perm, sign in _perm(t):
                phi[perm] = sign
            act = (
                -np.einsum("mjk,mi->ijk", phi, a)
                - np.einsum("imk,mj->ijk", phi, a)
                - np.einsum("ijm,mk->ijk", phi, a)
            )
            block[:, col] = [int(act[s]) for s in trip]
        rows.append(block)
    m = exact.qmat(np.vstack(rows).tolist())
    ker = exact.nullspace(m)
    if ker.ncols() != 1:
        raise ConstructionError(f"expected a unique invariant 3-form, found {ker.ncols()}")
    phi = np.zeros((n, n, n), dtype=np.int64)
    for col, t in enumerate(trip):
        v = int(ker[col, 0])
        for perm, sign in _perm(t):
            phi[perm] = sign * v
    return phi


def _perm(t):
    a, b, c = t
    return [((a, b, c), 1), ((b, c, a), 1), ((c, a, b), 1), ((b, a, c), -1), ((a, c, b), -1), ((c, b, a), -1)]


def invariant_symmetric_form(rep: tuple[flint.fmpq_mat, ...]) -> flint.fmpq_mat:
    """The (unique up to scale) invariant symmetric bilinear form of an irreducible rep."""
    n = rep[0].nrows()
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    cols = []
    for i, j in pairs:
        h = flint.fmpq_mat(n, n)
        h[i, j] = 1
        h[j, i] = 1
        eqs = [r.transpose() * h + h * r for r in rep]
        cols.append([v for e in eqs for v in e.entries()])
    m = flint.fmpq_mat(len(cols[0]), len(cols), [v for row in zip(*cols) for v in row])
    ker = exact.nullspace(m)
    if ker.ncols() != 1:
        raise ConstructionError("invariant symmetric form is not unique")
    h = flint.fmpq_mat(n, n)
    for col, (i, j) in enumerate(pairs):
        h[i, j] = ker[col, 0]
        h[j, i] = ker[col, 0]
    if h[0, 0] < 0:
        h = -h
    return h


def orthogonal_algebra(h: flint.fmpq_mat, name: str) -> StructureAlgebra:
    """so(n, h) = {A : A^T h + h A = 0} for a rational positive definite h."""
    n = h.nrows()
    gl = []
    for j in range(n):
        for k in range(n):
            e = flint.fmpq_mat(n, n)
            e[j, k] = 1
            gl.append(e)
    eqs = [(e.transpose() * h + h * e).entries() for e in gl]
    m = flint.fmpq_mat(n * n, len(gl), [v for row in zip(*eqs) for v in row])
    ker = exact.nullspace(m)
    mats = []
    for c in range(ker.ncols()):
        mats.append(np.array([int(ker[i, c]) for i in range(n * n)], dtype=np.int64).reshape(n, n))
    alg = matrix_algebra(np.array(mats), [f"o{i+1}" for i in range(len(mats))], name)
    return alg


@lru_cache(maxsize=None)
def principal_g2_sp2() -> Embedding:
    """Principal su(2) inside G2 x Sp(2).

    G2 is the stabilizer in gl(7) of the invariant 3-form of the 7-dim
    irreducible so(3)-module; Sp(2) is realized as the isomorphic so(5, h)
    of the 5-dim irreducible module, which is the principal su(2) of Sp(2).
    """
    so3 = build_classical("so", 3)
    rep7 = harmonic_rep(3)
    rep5 = harmonic_rep(2)
    phi = invariant_three_form(rep7)
    gl7 = []
    for j in range(7):
        for k in range(7):
            m = np.zeros((7, 7), dtype=np.int64)
            m[j, k] = 1
            gl7.append(m)
    gl7 = np.array(gl7)
    coeffs = three_form_stabilizer(phi, gl7)
    if coeffs.shape[1] != 14:
        raise ConstructionError("stabilizer of the invariant 3-form is not 14-dimensional")
    g2 = matrix_algebra(np.einsum("ak,aij->kij", coeffs, gl7), [f"g{i+1}" for i in range(14)], "g2")
    if not g2.is_negative_definite():
        raise ConstructionError("3-form stabilizer is not compact")
    h = invariant_symmetric_form(rep5)
    so5 = orthogonal_algebra(h, "sp(2)=so(5)")
    if so5.dim != 10 or not so5.is_negative_definite():
        raise ConstructionError("so(5, h) has the wrong shape")
    m7, d7 = _to_int_mats(rep7)
    m5, d5 = _to_int_mats(rep5)
    e1 = coords_in(g2, m7, d7)
    e2 = coords_in(so5, m5, d5)
    return subgroup_embedding("g2xsp2_su2", g2, so5, so3, e1, e2, [IdealBlock(0, 3)])
