"""Exact rational linear algebra on top of python-flint.

Everything algebraic in this package (structure constants, Killing forms,
embeddings, Casimir operators) is built over the rationals.  Matrices live in
``flint.fmpq_mat``; scalars handed back to callers are ``fractions.Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, isqrt, lcm
from typing import Iterable, Sequence

import flint
import numpy as np

Rational = Fraction


class DegenerateInput(ValueError):
    pass


def to_fraction(x) -> Fraction:
    """Parse ints, Fractions, fmpq, decimal strings and "p/q" strings exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, flint.fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, flint.fmpz):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        # decimal reading, so 0.5 -> 1/2 and 0.1 -> 1/10
        return Fraction(repr(float(x)))
    raise TypeError(f"cannot read {x!r} as a rational")


def to_fmpq(x) -> flint.fmpq:
    f = to_fraction(x)
    return flint.fmpq(f.numerator, f.denominator)


def qmat(rows: Sequence[Sequence]) -> flint.fmpq_mat:
    rows = [list(r) for r in rows]
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    return flint.fmpq_mat(nr, nc, [to_fmpq(v) for r in rows for v in r])


def qmat_from_int(a: np.ndarray, den: int = 1) -> flint.fmpq_mat:
    a = np.asarray(a)
    if a.ndim == 1:
        a = a[:, None]
    nr, nc = a.shape
    m = flint.fmpq_mat(nr, nc, [int(v) for v in a.ravel()])
    if den != 1:
        m = m / den
    return m


def identity(n: int) -> flint.fmpq_mat:
    m = flint.fmpq_mat(n, n)
    for i in range(n):
        m[i, i] = 1
    return m


def to_float(m: flint.fmpq_mat) -> np.ndarray:
    num, den = m.numer_denom()
    out = np.array([int(v) for v in num.entries()], dtype=float)
    return out.reshape(m.nrows(), m.ncols()) / int(den)


def to_fractions(m: flint.fmpq_mat) -> list[list[Fraction]]:
    return [[to_fraction(v) for v in row] for row in m.tolist()]


def numer_denom(m: flint.fmpq_mat) -> tuple[np.ndarray, int]:
    """Integer numerator as an object array (python ints) plus common denominator."""
    num, den = m.numer_denom()
    arr = np.array([int(v) for v in num.entries()], dtype=object)
    return arr.reshape(m.nrows(), m.ncols()), int(den)


def to_int64(arr: np.ndarray) -> np.ndarray:
    """Convert python-int arrays to int64, refusing silently lossy casts."""
    arr = np.asarray(arr, dtype=object)
    if arr.size and max(abs(int(v)) for v in arr.ravel()) >= 2**62:
        raise OverflowError("entries too large for int64 arithmetic")
    return arr.astype(np.int64)


def common_den(fracs: Iterable[Fraction]) -> int:
    return reduce(lcm, (f.denominator for f in fracs), 1)


def reduce_int(num: np.ndarray, den: int) -> tuple[np.ndarray, int]:
    """Divide out the gcd of all numerators and the denominator."""
    g = reduce(gcd, (int(v) for v in np.asarray(num).ravel()), int(den))
    if g > 1:
        return num // g, den // g
    return num, den


def is_zero(m: flint.fmpq_mat) -> bool:
    return all(v == 0 for v in m.entries())


def max_abs(m: flint.fmpq_mat) -> Fraction:
    return max((abs(to_fraction(v)) for v in m.entries()), default=Fraction(0))


def nullspace(m: flint.fmpq_mat) -> flint.fmpq_mat:
    """Columns spanning the right nullspace, scaled to primitive integer vectors."""
    num, _ = m.numer_denom()
    x, nullity = num.nullspace()
    cols = []
    for j in range(nullity):
        col = [int(x[i, j]) for i in range(x.nrows())]
        g = reduce(gcd, col, 0) or 1
        cols.append([v // g for v in col])
    out = flint.fmpq_mat(m.ncols(), len(cols))
    for j, col in enumerate(cols):
        for i, v in enumerate(col):
            out[i, j] = v
    return out


def hstack(mats: Sequence[flint.fmpq_mat]) -> flint.fmpq_mat:
    mats = [m for m in mats if m.ncols()]
    if not mats:
        raise ValueError("nothing to stack")
    nr = mats[0].nrows()
    out = flint.fmpq_mat(nr, sum(m.ncols() for m in mats))
    off = 0
    for m in mats:
        for i in range(nr):
            for j in range(m.ncols()):
                out[i, off + j] = m[i, j]
        off += m.ncols()
    return out


def vstack(mats: Sequence[flint.fmpq_mat]) -> flint.fmpq_mat:
    return hstack([m.transpose() for m in mats]).transpose()


def columns(m: flint.fmpq_mat, idx: Sequence[int]) -> flint.fmpq_mat:
    out = flint.fmpq_mat(m.nrows(), len(idx))
    for jj, j in enumerate(idx):
        for i in range(m.nrows()):
            out[i, jj] = m[i, j]
    return out


def rows(m: flint.fmpq_mat, idx: Sequence[int]) -> flint.fmpq_mat:
    return columns(m.transpose(), idx).transpose()


def block_diag(a: flint.fmpq_mat, b: flint.fmpq_mat) -> flint.fmpq_mat:
    out = flint.fmpq_mat(a.nrows() + b.nrows(), a.ncols() + b.ncols())
    for i in range(a.nrows()):
        for j in range(a.ncols()):
            out[i, j] = a[i, j]
    for i in range(b.nrows()):
        for j in range(b.ncols()):
            out[a.nrows() + i, a.ncols() + j] = b[i, j]
    return out


def solve_in_span(basis: flint.fmpq_mat, targets: flint.fmpq_mat) -> flint.fmpq_mat:
    """Coordinates C with basis * C == targets; raises if a target is outside the span."""
    bt = basis.transpose()
    coords = (bt * basis).solve(bt * targets)
    if not is_zero(basis * coords - targets):
        raise DegenerateInput("vector not in the span of the given basis")
    return coords


def rank(m: flint.fmpq_mat) -> int:
    return m.rank()


def proportionality(a: flint.fmpq_mat, b: flint.fmpq_mat) -> tuple[Fraction | None, Fraction]:
    """Return (r, residual) with a ~ r * b; r is None when b vanishes."""
    best = None
    for va, vb in zip(a.entries(), b.entries()):
        if vb != 0:
            best = to_fraction(va) / to_fraction(vb)
            break
    if best is None:
        return None, max_abs(a)
    return best, max_abs(a - b * to_fmpq(best))


def sqrt_fraction(q: Fraction) -> Fraction | None:
    """Exact square root when q is a rational square, else None."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None
