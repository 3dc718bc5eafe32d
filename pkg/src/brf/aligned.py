"""Aligned homogeneous spaces M = G1 x G2 / K.

An :class:`Embedding` gives k abstractly together with the two projections
pi_1, pi_2 as exact rational matrices.  :func:`verify_alignment` extracts
c1, c2 and the lambda_l from Killing-form Gram matrices, :func:`build_model`
computes everything that does not depend on the background metric (exact
reductive complements, Casimirs, assumption checks), and
:meth:`AlignedModel.at` builds the z1-dependent adapted basis used by the
curvature code.

Normalizations: z2 = 1/(c1 - 1), y1 = 1, y2 = -1/(c1 - 1).  The background
metric is g_b = z1(-B1) + z2(-B2) and the 3-form comes from Q = y1 B1 + y2 B2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import flint
import numpy as np

from . import exact
from .config import Tolerances
from .exact import DegenerateInput
from .liealg import (
    ParameterError,
    Representation,
    StructureAlgebra,
    adjoint_representation,
    casimir,
    orthonormal_basis,
    trivial_representation,
)


class NotAligned(ValueError):
    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report or {}


class MisuseError(ValueError):
    pass


class UnsupportedSpace(ValueError):
    pass


Number = Fraction | float


def as_number(z) -> Number:
    """Keep rationals exact, pass floats through."""
    if isinstance(z, (Fraction, int, np.integer)) or isinstance(z, str):
        return exact.to_fraction(z)
    return float(z)


@dataclass(frozen=True)
class IdealBlock:
    start: int
    end: int
    central: bool = False

    @property
    def size(self) -> int:
        return self.end - self.start

    def indices(self) -> range:
        return range(self.start, self.end)


@dataclass(frozen=True, eq=False)
class Embedding:
    """k -> g1 + g2 given by the exact coordinate matrices of pi_1 and pi_2."""

    name: str
    g1: StructureAlgebra
    g2: StructureAlgebra
    k: StructureAlgebra
    emb1: flint.fmpq_mat  # dim g1 x dim k
    emb2: flint.fmpq_mat  # dim g2 x dim k
    blocks: tuple[IdealBlock, ...]

    def validate(self) -> None:
        dk = self.k.dim
        if self.emb1.ncols() != dk or self.emb2.ncols() != dk:
            raise MisuseError("embedding matrices do not match dim k")
        covered = sorted((b.start, b.end) for b in self.blocks)
        pos = 0
        for s, e in covered:
            if s != pos:
                raise MisuseError("ideal blocks must partition the basis of k")
            pos = e
        if pos != dk:
            raise MisuseError("ideal blocks must partition the basis of k")
        for i, (g, emb) in enumerate(((self.g1, self.emb1), (self.g2, self.emb2)), start=1):
            if exact.is_zero(emb):
                raise MisuseError(f"projection to factor {i} is zero")
            if emb.rank() != dk:
                raise MisuseError(f"projection to factor {i} is not injective on k")
            if not _is_homomorphism(self.k, g, emb):
                raise MisuseError(f"projection to factor {i} does not respect brackets")
        for b in self.blocks:
            idx = list(b.indices())
            for i in idx:
                for j in range(dk):
                    out = np.nonzero(self.k.c_num[i, j])[0]
                    if not b.central and any(m not in idx for m in out):
                        raise MisuseError(f"block {b} is not an ideal of k")
                    if b.central and len(out):
                        raise MisuseError(f"block {b} is not central")

    def swapped(self) -> "Embedding":
        return Embedding(self.name, self.g2, self.g1, self.k, self.emb2, self.emb1, self.blocks)

    @property
    def total_dim(self) -> int:
        return self.g1.dim + self.g2.dim

    @property
    def k_matrix(self) -> flint.fmpq_mat:
        return exact.vstack([self.emb1, self.emb2])


def _is_homomorphism(k: StructureAlgebra, g: StructureAlgebra, emb: flint.fmpq_mat) -> bool:
    dk = k.dim
    cols = [exact.columns(emb, [a]) for a in range(dk)]
    ads = [g.ad_exact(c) for c in cols]
    for a in range(dk):
        for b in range(a + 1, dk):
            lhs = ads[a] * cols[b]
            rhs = flint.fmpq_mat(g.dim, 1)
            for m in np.nonzero(k.c_num[a, b])[0]:
                rhs += cols[m] * flint.fmpq(int(k.c_num[a, b, m]), k.c_den)
            if lhs != rhs:
                return False
    return True


def embedding_from_vectors(
    name: str,
    g1: StructureAlgebra,
    g2: StructureAlgebra,
    vectors: flint.fmpq_mat,
    blocks: Sequence[IdealBlock] | None = None,
) -> Embedding:
    """Build an embedding from explicit vectors of g1 + g2 spanning k.

    The structure constants of k are read off from the brackets.  Without an
    explicit ideal split, the center is required to be spanned by leading
    vectors, and [k, k] must be simple (checked through the commutant of the
    adjoint action, whose dimension counts simple ideals).
    """
    n1 = g1.dim
    dk = vectors.ncols()
    emb1 = exact.rows(vectors, range(n1))
    emb2 = exact.rows(vectors, range(n1, n1 + g2.dim))
    cols1 = [exact.columns(emb1, [a]) for a in range(dk)]
    cols2 = [exact.columns(emb2, [a]) for a in range(dk)]
    brackets = []
    for a in range(dk):
        ad1 = g1.ad_exact(cols1[a])
        ad2 = g2.ad_exact(cols2[a])
        for b in range(dk):
            brackets.append(exact.vstack([ad1 * cols1[b], ad2 * cols2[b]]))
    try:
        coords = exact.solve_in_span(vectors, exact.hstack(brackets))
    except DegenerateInput as exc:
        raise MisuseError("vectors do not span a subalgebra") from exc
    num, den = exact.numer_denom(coords)
    c = np.zeros((dk, dk, dk), dtype=object)
    for a in range(dk):
        for b in range(dk):
            c[a, b, :] = num[:, a * dk + b]
    c, den = exact.reduce_int(c, den)
    k = StructureAlgebra(
        name=f"k[{name}]",
        labels=tuple(f"k{i+1}" for i in range(dk)),
        c_num=exact.to_int64(c),
        c_den=int(den),
        ideals=((0, dk),),
    )
    if blocks is None:
        blocks = _infer_blocks(k)
    emb = Embedding(name, g1, g2, k, emb1, emb2, tuple(blocks))
    emb.validate()
    return emb


def _infer_blocks(k: StructureAlgebra) -> tuple[IdealBlock, ...]:
    dk = k.dim
    central = [i for i in range(dk) if not np.any(k.c_num[i])]
    if central != list(range(len(central))):
        raise MisuseError("central vectors must come first when no ideal split is given")
    z = len(central)
    blocks = []
    if z:
        blocks.append(IdealBlock(0, z, True))
    if z < dk:
        if commutant_dim(k, range(z, dk)) != 1:
            raise MisuseError("[k, k] is not simple; pass an explicit ideal split")
        blocks.append(IdealBlock(z, dk, False))
    return tuple(blocks)


def commutant_dim(k: StructureAlgebra, idx: Sequence[int]) -> int:
    """dim of {T : T ad(e_a) = ad(e_a) T} on the span of idx (float, SVD rank)."""
    idx = list(idx)
    ads = [k.ad_basis[a][np.ix_(idx, idx)] for a in idx]
    return intertwiner_dim_matrices(ads, ads)


# ---------------------------------------------------------------------------
# alignment


@dataclass(frozen=True)
class Alignment:
    c1: Fraction
    c2: Fraction
    lambdas: tuple[Fraction, ...]  # one per ideal block (0 for central blocks)
    c_il: tuple[tuple[Fraction, Fraction], ...]
    swapped: bool = False

    def certificate(self) -> dict:
        ok_sum = 1 / self.c1 + 1 / self.c2 == 1
        ok_prod = all(
            (c1l == lam * self.c1 and c2l == lam * self.c2)
            for lam, (c1l, c2l) in zip(self.lambdas, self.c_il)
        )
        return {"reciprocal_sum_is_one": ok_sum, "lambda_times_c_matches": ok_prod}


def _gram(emb: flint.fmpq_mat, form: flint.fmpq_mat) -> flint.fmpq_mat:
    return emb.transpose() * form * emb


def _block(m: flint.fmpq_mat, b: IdealBlock) -> flint.fmpq_mat:
    idx = list(b.indices())
    return exact.rows(exact.columns(m, idx), idx)


def verify_alignment(emb: Embedding, auto_swap: bool = True) -> Alignment:
    """Killing-form proportionality constants of the embedding.

    Raises :class:`NotAligned` with a per-ideal report when the Gram matrices
    of B_{g_i} on k are not proportional to that of B_g.
    """
    g1 = _gram(emb.emb1, emb.g1.killing_exact)
    g2 = _gram(emb.emb2, emb.g2.killing_exact)
    gt = g1 + g2
    if exact.is_zero(g1) or exact.is_zero(g2):
        raise MisuseError("a projection of k has zero Killing form")
    c1, res = exact.proportionality(gt, g1)
    if c1 is None or res != 0:
        report = {"ideals": []}
        for b in emb.blocks:
            r, rr = exact.proportionality(_block(gt, b), _block(g1, b))
            report["ideals"].append(
                {"block": [b.start, b.end], "ratio": None if r is None else str(r), "residual": str(rr)}
            )
        raise NotAligned("Killing forms of the factors are not proportional on k", report)
    c2 = 1 / (1 - 1 / c1)
    if auto_swap and c1 > 2:
        al = verify_alignment(emb.swapped(), auto_swap=False)
        return Alignment(al.c1, al.c2, al.lambdas, al.c_il, swapped=True)
    bk = emb.k.killing_exact
    lambdas, cil = [], []
    for b in emb.blocks:
        if b.central:
            lambdas.append(Fraction(0))
            cil.append((Fraction(0), Fraction(0)))
            continue
        lam, r0 = exact.proportionality(_block(bk, b), _block(gt, b))
        c1l, r1 = exact.proportionality(_block(bk, b), _block(g1, b))
        c2l, r2 = exact.proportionality(_block(bk, b), _block(g2, b))
        if lam is None or r0 != 0 or r1 != 0 or r2 != 0:
            raise NotAligned(f"Killing form of ideal {b} is not proportional", {"block": [b.start, b.end]})
        if not (c1l < 1 and c2l < 1):
            raise NotAligned(f"ideal {b} projects onto a full factor (c_il >= 1)", {"block": [b.start, b.end]})
        lambdas.append(lam)
        cil.append((c1l, c2l))
    return Alignment(c1, c2, tuple(lambdas), tuple(cil), swapped=False)


# ---------------------------------------------------------------------------
# intertwiners


def intertwiner_dim_matrices(rho_a: Sequence[np.ndarray], rho_b: Sequence[np.ndarray], rtol: float = 1e-9) -> int:
    """dim {T : T rho_a(Z) = rho_b(Z) T for all basis Z} by SVD rank."""
    na = rho_a[0].shape[0]
    nb = rho_b[0].shape[0]
    eqs = []
    ia, ib = np.eye(na), np.eye(nb)
    for ra, rb in zip(rho_a, rho_b):
        # vec(T ra - rb T) with column-major vec
        eqs.append(np.kron(ra.T, ib) - np.kron(ia, rb))
    m = np.vstack(eqs)
    s = np.linalg.svd(m, compute_uv=False)
    scale = max(1.0, float(s[0]) if s.size else 1.0)
    rank = int(np.sum(s > rtol * scale))
    return na * nb - rank


def intertwiner_dim(rep_a: Representation, rep_b: Representation, rtol: float = 1e-9) -> int:
    if rep_a.algebra is not rep_b.algebra and rep_a.algebra.dim != rep_b.algebra.dim:
        raise MisuseError("representations of different algebras")
    return intertwiner_dim_matrices(list(rep_a.matrices), list(rep_b.matrices), rtol)


def ideal_adjoint_representation(k: StructureAlgebra, block: IdealBlock) -> Representation:
    """k acting on the ideal k_j by the adjoint action (other ideals act trivially)."""
    idx = list(block.indices())
    mats = np.array([k.ad_basis[a][np.ix_(idx, idx)] for a in range(k.dim)])
    return Representation(k, mats)


# ---------------------------------------------------------------------------
# z1-independent model


@dataclass(frozen=True)
class CasimirInfo:
    exact_matrix: flint.fmpq_mat  # in the rational basis of p_i
    kappa: Fraction | None  # set when the Casimir is scalar
    cross_check: bool  # equals c_i times the Casimir w.r.t. <,> = -B_g|k

    @property
    def scalar(self) -> bool:
        return self.kappa is not None


@dataclass(frozen=True, eq=False)
class AlignedModel:
    embedding: Embedding  # already ordered so that c1 <= 2
    alignment: Alignment
    tol: Tolerances = field(default_factory=Tolerances)

    # -- constants ---------------------------------------------------------
    @property
    def name(self) -> str:
        return self.embedding.name

    @property
    def c1(self) -> Fraction:
        return self.alignment.c1

    @property
    def c2(self) -> Fraction:
        return self.alignment.c2

    @property
    def blocks(self) -> tuple[IdealBlock, ...]:
        return self.embedding.blocks

    @property
    def lambdas(self) -> tuple[Fraction, ...]:
        return self.alignment.lambdas

    @property
    def uniform_lambda(self) -> Fraction | None:
        """The common lambda when all non-central blocks share it (0 for abelian k)."""
        vals = {lam for lam, b in zip(self.lambdas, self.blocks) if not b.central}
        if not vals:
            return Fraction(0)
        if len(vals) == 1:
            return vals.pop()
        return None

    @property
    def has_center(self) -> bool:
        return any(b.central for b in self.blocks)

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.p1_exact.ncols(), self.p2_exact.ncols(), self.embedding.k.dim)

    @property
    def manifold_dim(self) -> int:
        return sum(self.dims)

    # -- exact reductive complements ----------------------------------------
    def _complement(self, i: int) -> flint.fmpq_mat:
        emb = self.embedding
        g, e = (emb.g1, emb.emb1) if i == 1 else (emb.g2, emb.emb2)
        return exact.nullspace(e.transpose() * g.killing_exact)

    @cached_property
    def p1_exact(self) -> flint.fmpq_mat:
        return self._complement(1)

    @cached_property
    def p2_exact(self) -> flint.fmpq_mat:
        return self._complement(2)

    def isotropy_exact(self, i: int) -> Representation:
        """k acting on p_i (rational basis of p_i) through pi_i."""
        emb = self.embedding
        g, e = (emb.g1, emb.emb1) if i == 1 else (emb.g2, emb.emb2)
        p = self.p1_exact if i == 1 else self.p2_exact
        pt = p.transpose()
        solver = (pt * p).inv() * pt
        mats = []
        for a in range(emb.k.dim):
            img = g.ad_exact(exact.columns(e, [a])) * p
            coords = solver * img
            if p * coords != img:
                raise DegenerateInput("p_i is not k-invariant")
            mats.append(coords)
        return Representation.from_exact(emb.k, mats)

    @cached_property
    def casimirs(self) -> tuple[CasimirInfo, CasimirInfo]:
        emb = self.embedding
        out = []
        for i in (1, 2):
            e, g = (emb.emb1, emb.g1) if i == 1 else (emb.emb2, emb.g2)
            rep = self.isotropy_exact(i)
            gi = _gram(e, g.killing_exact)
            cas = casimir(rep, gi * -1, exact_mode=True)
            gtot = _gram(emb.emb1, emb.g1.killing_exact) + _gram(emb.emb2, emb.g2.killing_exact)
            ci = self.c1 if i == 1 else self.c2
            cas_k = casimir(rep, gtot * -1, exact_mode=True)
            cross = cas == cas_k * exact.to_fmpq(ci)
            n = cas.nrows()
            kap = exact.to_fraction(cas[0, 0]) if n else Fraction(0)
            scalar = cas == exact.identity(n) * exact.to_fmpq(kap)
            out.append(CasimirInfo(cas, kap if scalar else None, bool(cross)))
        return out[0], out[1]

    @property
    def kappa1(self) -> Fraction | None:
        return self.casimirs[0].kappa

    @property
    def kappa2(self) -> Fraction | None:
        return self.casimirs[1].kappa

    # -- float bases independent of z1 --------------------------------------
    @cached_property
    def _float(self) -> dict:
        emb = self.embedding
        b1 = emb.g1.killing
        b2 = emb.g2.killing
        o1 = orthonormal_basis(exact.to_float(self.p1_exact), -b1)
        o2 = orthonormal_basis(exact.to_float(self.p2_exact), -b2)
        kmat = exact.to_float(emb.k_matrix)
        n1 = emb.g1.dim
        bg = np.zeros((emb.total_dim,) * 2)
        bg[:n1, :n1] = b1
        bg[n1:, n1:] = b2
        gk = -kmat.T @ bg @ kmat  # <,> on k coordinates
        # <,>-orthonormal basis of k adapted to the ideal blocks
        cols = []
        for b in self.blocks:
            sub = np.zeros((emb.k.dim, b.size))
            sub[b.start : b.end, :] = np.eye(b.size)
            cols.append(orthonormal_basis(sub, gk))
        u = np.hstack(cols)
        z = kmat @ u  # columns Z^alpha in g1 + g2
        return {"o1": o1, "o2": o2, "z": z, "u": u, "bg": bg, "b1": b1, "b2": b2, "gk": gk}

    def isotropy_float(self, i: int) -> np.ndarray:
        """rho(Z^alpha) on p_i in the -B_i-orthonormal basis, one per <,>-orthonormal Z^alpha."""
        emb = self.embedding
        f = self._float
        o = f["o1"] if i == 1 else f["o2"]
        g = emb.g1 if i == 1 else emb.g2
        b = f["b1"] if i == 1 else f["b2"]
        n1 = emb.g1.dim
        zs = f["z"][:n1] if i == 1 else f["z"][n1:]
        proj = o.T @ (-b)
        return np.array([proj @ g.ad(zs[:, a]) @ o for a in range(zs.shape[1])])

    @cached_property
    def casimirs_float(self) -> tuple[np.ndarray, np.ndarray]:
        """cas_{chi_i} w.r.t. -B_{g_i} in the -B_i-orthonormal basis of p_i."""
        out = []
        for i, ci in ((1, self.c1), (2, self.c2)):
            rho = self.isotropy_float(i)
            n = rho.shape[1]
            if rho.shape[0] == 0 or n == 0:
                out.append(np.zeros((n, n)))
                continue
            # Z^alpha are <,>-orthonormal; -B_i = (1/c_i)<,> on k
            out.append(-float(ci) * np.einsum("aij,ajk->ik", rho, rho))
        return out[0], out[1]

    # -- assumption check ---------------------------------------------------
    @cached_property
    def assumption(self) -> dict:
        """Sufficient intertwiner test for the isotropy assumption on p1, p2."""
        k = self.embedding.k
        details = []
        ok = True
        reps = {}
        for i in (1, 2):
            rho = self.isotropy_float(i)
            # representation matrices indexed by the original k basis
            u = self._float["u"]
            uinv = np.linalg.inv(u)
            mats = np.einsum("ba,bij->aij", uinv, rho)
            reps[i] = Representation(k, mats)
        for i in (1, 2):
            if reps[i].space_dim == 0:
                continue
            for b in self.blocks:
                if b.central:
                    continue
                d = intertwiner_dim(reps[i], ideal_adjoint_representation(k, b), self.tol.rank)
                details.append({"p": i, "ideal": [b.start, b.end], "intertwiners": d})
                ok &= d == 0
            if self.has_center:
                d = intertwiner_dim(reps[i], trivial_representation(k), self.tol.rank)
                details.append({"p": i, "ideal": "trivial", "intertwiners": d})
                ok &= d == 0
        return {"holds": bool(ok), "checks": details}

    def at(self, z1) -> "AlignedSpace":
        return build_space(self, z1)


def build_model(emb: Embedding, tol: Tolerances | None = None, auto_swap: bool = True) -> AlignedModel:
    emb.validate()
    al = verify_alignment(emb, auto_swap=auto_swap)
    if al.swapped:
        emb = emb.swapped()
    return AlignedModel(emb, al, tol or Tolerances())


# ---------------------------------------------------------------------------
# z1-dependent space


@dataclass(frozen=True)
class SpaceConstants:
    z1: Number
    z2: Number
    y1: Number
    y2: Number
    A3: Number
    B3: Number
    C3: Number
    B4: Number

    @classmethod
    def normalized(cls, c1: Fraction, z1) -> "SpaceConstants":
        z1 = as_number(z1)
        if z1 <= 0:
            raise ParameterError("z1 must be positive")
        c1n = c1 if isinstance(z1, Fraction) else float(c1)
        c2n = c1n / (c1n - 1)
        z2 = 1 / (c1n - 1)
        y1 = c1n / c1n  # 1 in the same number type
        y2 = -1 / (c1n - 1)
        a3 = -c2n * z1 / (c1n * z2)
        b3 = z1 / c1n + a3 * a3 * z2 / c2n
        c3 = y1 / c1n + a3 * y2 / c2n
        b4 = z1 / c1n + z2 / c2n
        return cls(z1, z2, y1, y2, a3, b3, c3, b4)


@dataclass(frozen=True, eq=False)
class AlignedSpace:
    model: AlignedModel
    const: SpaceConstants

    @property
    def z1(self) -> Number:
        return self.const.z1

    @property
    def c1(self) -> Fraction:
        return self.model.c1

    @property
    def c2(self) -> Fraction:
        return self.model.c2

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.model.dims

    @cached_property
    def slices(self) -> dict[str, slice]:
        d1, d2, d3 = self.dims
        return {
            "p1": slice(0, d1),
            "p2": slice(d1, d1 + d2),
            "p3": slice(d1 + d2, d1 + d2 + d3),
            "k": slice(d1 + d2 + d3, d1 + d2 + 2 * d3),
        }

    @property
    def np(self) -> int:
        return sum(self.dims)

    @cached_property
    def p3_blocks(self) -> list[tuple[slice, Fraction]]:
        """(slice in the p-basis, lambda_l) for every p3^l block."""
        off = self.dims[0] + self.dims[1]
        out = []
        for b, lam in zip(self.model.blocks, self.model.lambdas):
            out.append((slice(off + b.start, off + b.end), lam))
        return out

    @cached_property
    def basis(self) -> np.ndarray:
        """Columns: g_b-orthonormal e^1, e^2, e^3, e^4 as vectors of g1 + g2."""
        f = self.model._float
        emb = self.model.embedding
        n1, n = emb.g1.dim, emb.total_dim
        c = self.const
        d1, d2, d3 = self.dims
        e = np.zeros((n, d1 + d2 + 2 * d3))
        e[:n1, :d1] = f["o1"] / np.sqrt(float(c.z1))
        e[n1:, d1 : d1 + d2] = f["o2"] / np.sqrt(float(c.z2))
        z = f["z"]
        e3 = np.vstack([z[:n1], float(c.A3) * z[n1:]]) / np.sqrt(float(c.B3))
        e[:, d1 + d2 : d1 + d2 + d3] = e3
        e[:, d1 + d2 + d3 :] = z / np.sqrt(float(c.B4))
        return e

    @cached_property
    def gb_matrix(self) -> np.ndarray:
        f = self.model._float
        n1 = self.model.embedding.g1.dim
        gb = -f["bg"].copy()
        gb[:n1, :n1] *= float(self.const.z1)
        gb[n1:, n1:] *= float(self.const.z2)
        return gb

    @cached_property
    def q_matrix(self) -> np.ndarray:
        """Q = y1 B1 + y2 B2 on g1 + g2 (original basis)."""
        f = self.model._float
        n1 = self.model.embedding.g1.dim
        q = f["bg"].copy()
        q[:n1, :n1] *= float(self.const.y1)
        q[n1:, n1:] *= float(self.const.y2)
        return q

    @cached_property
    def structure(self) -> np.ndarray:
        """Structure constants in the adapted basis: [E_a, E_b] = sum_c C[a,b,c] E_c."""
        emb = self.model.embedding
        e = self.basis
        einv = np.linalg.inv(e)
        n1 = emb.g1.dim
        c1 = np.einsum("ia,jb,ijm->abm", e[:n1], e[:n1], emb.g1.c)
        c2 = np.einsum("ia,jb,ijm->abm", e[n1:], e[n1:], emb.g2.c)
        return np.einsum("abm,cm->abc", c1, einv[:, :n1]) + np.einsum("abm,cm->abc", c2, einv[:, n1:])

    @cached_property
    def killing_adapted(self) -> np.ndarray:
        e = self.basis
        return e.T @ self.model._float["bg"] @ e

    @cached_property
    def q_adapted(self) -> np.ndarray:
        e = self.basis
        return e.T @ self.q_matrix @ e

    def casimir_blocks(self) -> tuple[np.ndarray, np.ndarray]:
        """cas_{chi_1}, cas_{chi_2} in the adapted (g_b-orthonormal) p_i bases."""
        return self.model.casimirs_float

    def gb_gram(self) -> np.ndarray:
        e = self.basis
        return e.T @ self.gb_matrix @ e


def build_space(model: AlignedModel | Embedding, z1) -> AlignedSpace:
    if isinstance(model, Embedding):
        model = build_model(model)
    return AlignedSpace(model, SpaceConstants.normalized(model.c1, z1))


def q_form(space: AlignedSpace) -> np.ndarray:
    """Q as a bilinear form in the adapted basis (p1, p2, p3, k)."""
    return space.q_adapted


def casimir_kappas(model: AlignedModel) -> dict:
    c1, c2 = model.casimirs
    return {
        "kappa1": c1.kappa,
        "kappa2": c2.kappa,
        "scalar1": c1.scalar,
        "scalar2": c2.scalar,
        "cross_check": c1.cross_check and c2.cross_check,
        "kappa1_matrix": c1.exact_matrix,
        "kappa2_matrix": c2.exact_matrix,
    }
