"""Compact Lie algebras as structure-constant tensors.

Algebras are built from integer matrix realizations, so structure constants
are exact rationals, stored as an int64 numerator tensor with one common
denominator.  ``c[i, j, k]`` is the coefficient of ``e_k`` in ``[e_i, e_j]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import flint
import numpy as np

from . import exact
from .exact import DegenerateInput


class ParameterError(ValueError):
    pass


class ConstructionError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# matrix realizations


def realify(m: np.ndarray) -> np.ndarray:
    """Complex N x N (Gaussian-integer) matrix -> real 2N x 2N integer matrix."""
    m = np.asarray(m)
    re = np.rint(m.real).astype(np.int64)
    im = np.rint(m.imag).astype(np.int64)
    if not (np.array_equal(re, m.real) and np.array_equal(im, m.imag)):
        raise ValueError("realify expects Gaussian-integer entries")
    return np.block([[re, -im], [im, re]])


@dataclass(frozen=True, eq=False)
class MatrixRealization:
    """A faithful real matrix representation: basis element i is mats[i] / den."""

    mats: np.ndarray  # (dim, N, N) int64
    den: int = 1
    complex_size: int | None = None  # set when the matrices are realified complex ones

    @property
    def size(self) -> int:
        return self.mats.shape[1]

    @cached_property
    def _basis(self) -> flint.fmpq_mat:
        d = self.mats.shape[0]
        return exact.qmat_from_int(self.mats.reshape(d, -1).T, self.den)

    @cached_property
    def _left_inverse(self) -> flint.fmpq_mat:
        b = self._basis
        bt = b.transpose()
        return (bt * b).inv() * bt

    def coords(self, mats: np.ndarray, den: int = 1) -> flint.fmpq_mat:
        """Exact coordinates (one column per input matrix) of integer matrices mats/den."""
        mats = np.asarray(mats)
        if mats.ndim == 2:
            mats = mats[None]
        targets = exact.qmat_from_int(mats.reshape(mats.shape[0], -1).T, den)
        out = self._left_inverse * targets
        if not exact.is_zero(self._basis * out - targets):
            raise DegenerateInput("matrix is not in the span of this realization")
        return out

    def element(self, coeffs: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs, dtype=float), self.mats, axes=1) / self.den


# ---------------------------------------------------------------------------
# algebras


@dataclass(frozen=True, eq=False)
class StructureAlgebra:
    name: str
    labels: tuple[str, ...]
    c_num: np.ndarray  # (dim, dim, dim) int64
    c_den: int = 1
    ideals: tuple[tuple[int, int], ...] = ()
    realization: MatrixRealization | None = None
    summands: tuple["StructureAlgebra", ...] = ()

    @property
    def dim(self) -> int:
        return self.c_num.shape[0]

    @cached_property
    def c(self) -> np.ndarray:
        return self.c_num.astype(float) / self.c_den

    def c_exact(self, i: int, j: int, k: int) -> Fraction:
        return Fraction(int(self.c_num[i, j, k]), self.c_den)

    @cached_property
    def _killing_num(self) -> np.ndarray:
        if self.summands:
            blocks = [s._killing_num * (self.c_den**2 // s.c_den**2) for s in self.summands]
            out = np.zeros((self.dim, self.dim), dtype=object)
            off = 0
            for b in blocks:
                n = b.shape[0]
                out[off : off + n, off : off + n] = b
                off += n
            return out
        bound = int(np.abs(self.c_num).max(initial=0)) ** 2 * self.dim**2
        if bound >= 2**62:
            c = self.c_num.astype(object)
            return np.einsum("iab,jba->ij", c, c)
        return np.einsum("iab,jba->ij", self.c_num, self.c_num).astype(object)

    @cached_property
    def killing(self) -> np.ndarray:
        return self._killing_num.astype(float) / self.c_den**2

    @cached_property
    def killing_exact(self) -> flint.fmpq_mat:
        return exact.qmat_from_int(self._killing_num, self.c_den**2)

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.c)

    def ad(self, x) -> np.ndarray:
        """Matrix of ad(x): column j is [x, e_j]."""
        return np.einsum("i,ijk->kj", np.asarray(x, dtype=float), self.c)

    @cached_property
    def ad_basis(self) -> np.ndarray:
        """ad(e_i) for every basis element, shape (dim, dim, dim)."""
        return np.transpose(self.c, (0, 2, 1))

    def ad_exact(self, x: flint.fmpq_mat) -> flint.fmpq_mat:
        """Exact ad(x) for a column vector x."""
        n = self.dim
        m = flint.fmpq_mat(n, n)
        xs = [exact.to_fraction(x[i, 0]) for i in range(n)]
        nz = [(i, v) for i, v in enumerate(xs) if v != 0]
        for j in range(n):
            for k in range(n):
                s = Fraction(0)
                for i, v in nz:
                    cij = self.c_num[i, j, k]
                    if cij:
                        s += v * int(cij)
                if s:
                    m[k, j] = exact.to_fmpq(s / self.c_den)
        return m

    def bracket_exact(self, x: flint.fmpq_mat, y: flint.fmpq_mat) -> flint.fmpq_mat:
        return self.ad_exact(x) * y

    def antisymmetry_exact(self) -> bool:
        return bool(np.array_equal(self.c_num, -np.transpose(self.c_num, (1, 0, 2))))

    def _jacobi_blocks(self):
        if self.summands:
            off = 0
            for s in self.summands:
                yield off, s
                off += s.dim
        else:
            yield 0, self

    def jacobi_residual(self) -> float:
        """max |sum_m c_ij^m c_mk^l + cyclic| in float arithmetic."""
        worst = 0.0
        for _, alg in self._jacobi_blocks():
            c = alg.c
            n = alg.dim
            t = np.tensordot(c, c, axes=([2], [0]))  # t[i,j,k,l] = c_ij^m c_mk^l
            jac = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
            worst = max(worst, float(np.abs(jac).max(initial=0.0)))
            del n
        return worst

    def jacobi_exact(self) -> bool:
        for _, alg in self._jacobi_blocks():
            c = alg.c_num
            n = alg.dim
            t = (c.reshape(n * n, n) @ c.reshape(n, n * n)).reshape(n, n, n, n)
            jac = t + np.transpose(t, (1, 2, 0, 3)) + np.transpose(t, (2, 0, 1, 3))
            if np.any(jac):
                return False
        return True

    def is_negative_definite(self) -> bool:
        return bool(np.linalg.eigvalsh(self.killing).max(initial=-1.0) < 0)

    def to_json(self, exact_values: bool = True) -> dict:
        entries = []
        for i, j, k in zip(*np.nonzero(self.c_num)):
            if exact_values:
                v = Fraction(int(self.c_num[i, j, k]), self.c_den)
                val = str(v)
            else:
                val = float(self.c[i, j, k])
            entries.append([int(i), int(j), int(k), val])
        return {"dim": self.dim, "labels": list(self.labels), "c": entries}

    @classmethod
    def from_json(cls, doc: dict, name: str = "algebra") -> "StructureAlgebra":
        n = int(doc["dim"])
        vals = [(int(i), int(j), int(k), exact.to_fraction(v)) for i, j, k, v in doc["c"]]
        den = exact.common_den(v for *_, v in vals)
        num = np.zeros((n, n, n), dtype=np.int64)
        for i, j, k, v in vals:
            num[i, j, k] = int(v * den)
        alg = cls(name=name, labels=tuple(doc.get("labels") or [f"e{i}" for i in range(n)]),
                  c_num=num, c_den=den, ideals=((0, n),))
        if not alg.antisymmetry_exact():
            raise ParameterError("structure constants are not antisymmetric")
        return alg


def matrix_algebra(
    mats: np.ndarray,
    labels: Sequence[str],
    name: str,
    den: int = 1,
    complex_size: int | None = None,
) -> StructureAlgebra:
    """Structure constants of the real span of integer matrices mats/den (must close)."""
    mats = np.asarray(mats, dtype=np.int64)
    d, n, _ = mats.shape
    real = MatrixRealization(mats, den, complex_size)
    left = real._left_inverse
    lnum, lden = exact.numer_denom(left)
    # [e_i, e_j] = brk_ij / den**2, whose coordinates are lnum @ brk / (lden * den**2)
    prods = np.einsum("iab,jbc->ijac", mats, mats)
    brk = prods - np.transpose(prods, (1, 0, 2, 3))
    v = brk.reshape(d * d, n * n).T
    bound = int(np.abs(lnum).max(initial=0)) * int(np.abs(v).max(initial=0)) * n * n
    if bound < 2**62:
        cn = exact.to_int64(lnum) @ v
    else:
        cn = lnum @ v.astype(object)
    total_den = lden * den * den
    # closure: (mats/den) @ coords must reproduce the bracket exactly
    check = mats.reshape(d, -1).T.astype(object) @ np.asarray(cn, dtype=object)
    if np.any(check != v.astype(object) * (lden * den)):
        raise ConstructionError(f"{name}: matrices do not close under the bracket")
    cnum = np.asarray(cn, dtype=object).T.reshape(d, d, d)
    cnum, total_den = exact.reduce_int(cnum, total_den)
    alg = StructureAlgebra(
        name=name,
        labels=tuple(labels),
        c_num=exact.to_int64(cnum),
        c_den=int(total_den),
        ideals=((0, d),),
        realization=real,
    )
    return alg


def _elementary(n: int, j: int, k: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=complex)
    m[j, k] = 1
    return m


def _su_basis(n: int):
    mats, labels = [], []
    for j, k in itertools.combinations(range(n), 2):
        mats.append(_elementary(n, j, k) - _elementary(n, k, j))
        labels.append(f"a{j+1}{k+1}")
        mats.append(1j * (_elementary(n, j, k) + _elementary(n, k, j)))
        labels.append(f"s{j+1}{k+1}")
    for j in range(n - 1):
        mats.append(1j * (_elementary(n, j, j) - _elementary(n, j + 1, j + 1)))
        labels.append(f"h{j+1}")
    return mats, labels


def _so_basis(n: int):
    mats, labels = [], []
    for j, k in itertools.combinations(range(n), 2):
        m = np.zeros((n, n), dtype=np.int64)
        m[j, k], m[k, j] = 1, -1
        mats.append(m)
        labels.append(f"E{j+1}{k+1}")
    return mats, labels


def _sp_basis(n: int):
    """sp(n) = {X in u(2n) : X^T J + J X = 0} with blocks [[A, -conj(B)], [B, conj(A)]]."""
    mats, labels = [], []
    z = np.zeros((n, n), dtype=complex)

    def blk(a, b):
        return np.block([[a, -b.conj()], [b, a.conj()]])

    for j, k in itertools.combinations(range(n), 2):
        mats.append(blk(_elementary(n, j, k) - _elementary(n, k, j), z))
        labels.append(f"a{j+1}{k+1}")
        mats.append(blk(1j * (_elementary(n, j, k) + _elementary(n, k, j)), z))
        labels.append(f"s{j+1}{k+1}")
    for j in range(n):
        mats.append(blk(1j * _elementary(n, j, j), z))
        labels.append(f"h{j+1}")
    for j, k in itertools.combinations_with_replacement(range(n), 2):
        sym = _elementary(n, j, k) + (_elementary(n, k, j) if j != k else 0)
        mats.append(blk(z, sym))
        labels.append(f"b{j+1}{k+1}")
        mats.append(blk(z, 1j * sym))
        labels.append(f"c{j+1}{k+1}")
    return mats, labels


def build_classical(family: str, n: int) -> StructureAlgebra:
    """Compact real form su(n), so(n) or sp(n) in a fixed rational basis.

    su(n): E_jk - E_kj, i(E_jk + E_kj), i(E_jj - E_{j+1,j+1});
    so(n): E_jk - E_kj;
    sp(n): quaternionic block matrices inside u(2n).
    """
    family = family.lower()
    if family == "su":
        if n < 2:
            raise ParameterError("su(n) needs n >= 2")
        mats, labels = _su_basis(n)
        real = np.array([realify(m) for m in mats])
        return matrix_algebra(real, labels, f"su({n})", complex_size=n)
    if family == "so":
        if n < 3:
            raise ParameterError("so(n) needs n >= 3")
        mats, labels = _so_basis(n)
        return matrix_algebra(np.array(mats), labels, f"so({n})")
    if family == "sp":
        if n < 1:
            raise ParameterError("sp(n) needs n >= 1")
        mats, labels = _sp_basis(n)
        real = np.array([realify(m) for m in mats])
        return matrix_algebra(real, labels, f"sp({n})", complex_size=2 * n)
    raise ParameterError(f"unsupported family {family!r}")


def complex_matrices(alg: StructureAlgebra) -> np.ndarray:
    """Undo realify for an algebra built from complex matrices (float view)."""
    real = alg.realization
    if real is None or real.complex_size is None:
        raise ParameterError(f"{alg.name} has no complex realization")
    n = real.complex_size
    m = real.mats.astype(float) / real.den
    return m[:, n:, :n] * 1j + m[:, :n, :n]


def direct_sum(a: StructureAlgebra, b: StructureAlgebra) -> StructureAlgebra:
    """a ⊕ b with block-diagonal structure constants."""
    den = np.lcm(a.c_den, b.c_den)
    n, m = a.dim, b.dim
    c = np.zeros((n + m,) * 3, dtype=np.int64)
    c[:n, :n, :n] = a.c_num * (den // a.c_den)
    c[n:, n:, n:] = b.c_num * (den // b.c_den)
    ideals = tuple(a.ideals or ((0, n),)) + tuple((s + n, e + n) for s, e in (b.ideals or ((0, m),)))
    parts_a = a.summands or (a,)
    parts_b = b.summands or (b,)
    return StructureAlgebra(
        name=f"{a.name}+{b.name}",
        labels=tuple(f"1:{x}" for x in a.labels) + tuple(f"2:{x}" for x in b.labels),
        c_num=c,
        c_den=int(den),
        ideals=ideals,
        summands=parts_a + parts_b,
    )


# ---------------------------------------------------------------------------
# g2 as a 3-form stabilizer

# Associative calibration on R^7 (1-based index triples with signs).
G2_PHI_TERMS: tuple[tuple[int, int, int, int], ...] = (
    (1, 2, 3, 1),
    (1, 4, 5, 1),
    (1, 6, 7, 1),
    (2, 4, 6, 1),
    (2, 5, 7, -1),
    (3, 4, 7, -1),
    (3, 5, 6, -1),
)


def three_form_tensor(terms, n: int = 7) -> np.ndarray:
    phi = np.zeros((n, n, n), dtype=np.int64)
    for a, b, c, s in terms:
        for perm, sign in _perm_signs((a - 1, b - 1, c - 1)):
            phi[perm] = s * sign
    return phi


def _perm_signs(idx):
    a, b, c = idx
    return [((a, b, c), 1), ((b, c, a), 1), ((c, a, b), 1), ((b, a, c), -1), ((a, c, b), -1), ((c, b, a), -1)]


def _form_action_matrix(mats: np.ndarray, phi: np.ndarray) -> flint.fmpq_mat:
    """Linear map A -> A.phi (on independent components i<j<k), one column per matrix."""
    n = phi.shape[0]
    trip = list(itertools.combinations(range(n), 3))
    cols = []
    for a in mats:
        # (A.phi)(u,v,w) = -phi(Au,v,w) - phi(u,Av,w) - phi(u,v,Aw)
        act = (
            -np.einsum("mjk,mi->ijk", phi, a)
            - np.einsum("imk,mj->ijk", phi, a)
            - np.einsum("ijm,mk->ijk", phi, a)
        )
        cols.append([int(act[t]) for t in trip])
    return exact.qmat(np.array(cols).T.tolist())


def three_form_stabilizer(phi: np.ndarray, ambient: np.ndarray) -> np.ndarray:
    """Integer combinations of ambient integer matrices annihilating phi."""
    ker = exact.nullspace(_form_action_matrix(ambient, phi))
    coeffs = np.array([[int(ker[i, j]) for j in range(ker.ncols())] for i in range(ker.nrows())], dtype=np.int64)
    return coeffs  # (len(ambient), k)


def build_g2(phi: np.ndarray | None = None, ambient: str = "so") -> StructureAlgebra:
    """Compact g2 as the annihilator of a generic 3-form on R^7.

    With the default associative calibration the ambient is so(7); for an
    arbitrary rational 3-form pass ``ambient="gl"``.
    """
    phi = three_form_tensor(G2_PHI_TERMS) if phi is None else np.asarray(phi, dtype=np.int64)
    if ambient == "so":
        amb, _ = _so_basis(7)
    elif ambient == "gl":
        amb = []
        for j in range(7):
            for k in range(7):
                m = np.zeros((7, 7), dtype=np.int64)
                m[j, k] = 1
                amb.append(m)
    else:
        raise ParameterError(f"unknown ambient {ambient!r}")
    amb = np.array(amb, dtype=np.int64)
    coeffs = three_form_stabilizer(phi, amb)
    if coeffs.shape[1] != 14:
        raise ConstructionError(f"3-form stabilizer has dimension {coeffs.shape[1]}, expected 14")
    mats = np.einsum("ak,aij->kij", coeffs, amb)
    alg = matrix_algebra(mats, [f"g{i+1}" for i in range(14)], "g2")
    if not alg.is_negative_definite():
        raise ConstructionError("3-form stabilizer is not compact")
    return alg


# ---------------------------------------------------------------------------
# representations and Casimirs


@dataclass(frozen=True, eq=False)
class Representation:
    """rho(e_i) for each basis element of ``algebra``; exact matrices optional."""

    algebra: StructureAlgebra
    matrices: np.ndarray  # (dim_alg, n, n) float
    exact_matrices: tuple[flint.fmpq_mat, ...] | None = None

    @property
    def space_dim(self) -> int:
        return self.matrices.shape[1]

    @classmethod
    def from_exact(cls, algebra: StructureAlgebra, mats: Sequence[flint.fmpq_mat]) -> "Representation":
        fl = np.array([exact.to_float(m) for m in mats]) if mats else np.zeros((0, 0, 0))
        return cls(algebra, fl, tuple(mats))

    def homomorphism_residual(self) -> float:
        r = self.matrices
        comm = np.einsum("iab,jbc->ijac", r, r)
        comm = comm - np.transpose(comm, (1, 0, 2, 3))
        image = np.einsum("ijk,kab->ijab", self.algebra.c, r)
        return float(np.abs(comm - image).max(initial=0.0))


def adjoint_representation(alg: StructureAlgebra) -> Representation:
    mats = []
    for i in range(alg.dim):
        e = flint.fmpq_mat(alg.dim, 1)
        e[i, 0] = 1
        mats.append(alg.ad_exact(e))
    return Representation(alg, alg.ad_basis.copy(), tuple(mats))


def trivial_representation(alg: StructureAlgebra, n: int = 1) -> Representation:
    return Representation(
        alg, np.zeros((alg.dim, n, n)), tuple(flint.fmpq_mat(n, n) for _ in range(alg.dim))
    )


def _check_invariant(alg: StructureAlgebra, inner: np.ndarray, tol: float) -> None:
    # inner([x,y],z) + inner(y,[x,z]) = 0 for basis triples
    ad = alg.ad_basis
    t = np.einsum("xky,kz->xyz", ad, inner)
    resid = t + np.transpose(t, (0, 2, 1))
    if np.abs(resid).max(initial=0.0) > tol:
        raise ParameterError("inner product is not ad-invariant")


def casimir(rep: Representation, inner, exact_mode: bool = False, tol: float = 1e-9):
    """-sum_i rho(X_i)^2 over an inner-orthonormal basis.

    Computed as -sum_ab (inner^{-1})_ab rho(e_a) rho(e_b), which is basis
    independent, so exact inputs give an exact result.
    """
    alg = rep.algebra
    if exact_mode:
        if not isinstance(inner, flint.fmpq_mat):
            inner = exact.qmat(inner)
        n = inner.nrows()
        for k in range(1, n + 1):
            if exact.rows(exact.columns(inner, range(k)), range(k)).det() <= 0:
                raise ParameterError("inner product is not positive definite")
        _check_invariant(alg, exact.to_float(inner), tol)
        inv = inner.inv()
        mats = rep.exact_matrices
        if mats is None:
            raise ParameterError("exact Casimir needs exact representation matrices")
        size = rep.space_dim
        out = flint.fmpq_mat(size, size)
        for a in range(n):
            acc = flint.fmpq_mat(size, size)
            for b in range(n):
                if inv[a, b] != 0:
                    acc += mats[b] * inv[a, b]
            out -= mats[a] * acc
        return out
    inner = np.asarray(inner, dtype=float)
    if np.linalg.eigvalsh(inner).min(initial=1.0) <= 0:
        raise ParameterError("inner product is not positive definite")
    _check_invariant(alg, inner, tol)
    inv = np.linalg.inv(inner)
    r = rep.matrices
    return -np.einsum("ab,aij,bjk->ik", inv, r, r)


def orthonormal_basis(vectors: np.ndarray, inner: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Gram-Schmidt (twice) of the columns of ``vectors`` with respect to ``inner``."""
    v = np.array(vectors, dtype=float, copy=True)
    if v.ndim == 1:
        v = v[:, None]
    inner = np.asarray(inner, dtype=float)
    out = []
    for j in range(v.shape[1]):
        w = v[:, j].copy()
        for _ in range(2):
            for u in out:
                w -= (u @ inner @ w) * u
        nrm2 = w @ inner @ w
        scale = max(1.0, float(v[:, j] @ inner @ v[:, j]))
        if nrm2 <= tol * scale:
            raise DegenerateInput("vectors are linearly dependent")
        out.append(w / np.sqrt(nrm2))
    return np.array(out).T
