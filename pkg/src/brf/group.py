"""Left-invariant diagonal metrics on a compact Lie group and their BRF equations.

The background is bi-invariant, g_b = z_1(-B) + ... + z_s(-B) over the
simple ideals, and e_1..e_n is a g_b-orthonormal basis adapted to the
ideals.  With c_ij^k = g_b([e_i,e_j], e_k) (totally skew) and
g = diag(x_1..x_n):

    H_b^2(e_k,e_l)  = sum c_ij^k c_ij^l / (x_i x_j)
    ric(e_k,e_l)    = -B(e_k,e_l)/2 - sum c_ij^k c_ij^l (x_i^2 + x_j^2 - x_k x_l) / (4 x_i x_j)
    brf1(e_k,e_l)   = sum c_ij^k c_ij^l ((x_i - x_j)^2 - x_k x_l + 1) / (x_i x_j)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import flint
import numpy as np
from scipy.optimize import brentq

from . import exact
from .config import MultistartConfig
from .curvature import codifferential_from_structure, h_squared_from_coeffs, ricci_from_structure
from .liealg import ParameterError, StructureAlgebra, build_classical, direct_sum, orthonormal_basis
from .newton import damped_newton, dedupe


@dataclass(frozen=True, eq=False)
class GroupBackground:
    """A g_b-orthonormal basis of the algebra for g_b = sum_i z_i (-B) on the ideals."""

    algebra: StructureAlgebra
    gb_scale: tuple[float, ...] = ()

    def __post_init__(self):
        ideals = self.ideals
        scale = self.gb_scale or (1.0,) * len(ideals)
        if len(scale) != len(ideals):
            raise ParameterError(f"need one scale per ideal ({len(ideals)})")
        if any(s <= 0 for s in scale):
            raise ParameterError("ideal scales must be positive")
        object.__setattr__(self, "gb_scale", tuple(float(s) for s in scale))

    @property
    def ideals(self) -> tuple[tuple[int, int], ...]:
        return self.algebra.ideals or ((0, self.algebra.dim),)

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @cached_property
    def abelian(self) -> bool:
        return not np.any(self.algebra.c_num)

    @cached_property
    def basis(self) -> np.ndarray:
        n = self.dim
        kil = self.algebra.killing
        e = np.zeros((n, n))
        for (s, t), z in zip(self.ideals, self.gb_scale):
            sub = np.zeros((n, t - s))
            sub[s:t] = np.eye(t - s)
            block = -kil[s:t, s:t]
            if not np.any(block):
                # abelian ideal: -B vanishes, use the given basis as orthonormal
                on = sub
            else:
                on = orthonormal_basis(sub, -kil)
            e[:, s:t] = on / np.sqrt(z)
        return e

    @cached_property
    def gb_matrix(self) -> np.ndarray:
        n = self.dim
        kil = self.algebra.killing
        gb = np.zeros((n, n))
        for (s, t), z in zip(self.ideals, self.gb_scale):
            block = -kil[s:t, s:t]
            gb[s:t, s:t] = z * (block if np.any(block) else np.eye(t - s))
        return gb

    @cached_property
    def structure(self) -> np.ndarray:
        """c[i,j,k] = g_b([e_i, e_j], e_k)."""
        e = self.basis
        brk = np.einsum("ai,bj,abm->ijm", e, e, self.algebra.c)
        return np.einsum("ijm,mn,nk->ijk", brk, self.gb_matrix, e)

    @cached_property
    def killing(self) -> np.ndarray:
        e = self.basis
        return e.T @ self.algebra.killing @ e

    @cached_property
    def cc(self) -> np.ndarray:
        """cc[k,l,i,j] = c_ij^k c_ij^l."""
        c = self.structure
        return np.einsum("ijk,ijl->klij", c, c)


@dataclass(frozen=True, eq=False)
class GroupMetric:
    background: GroupBackground
    x: np.ndarray = field(default=None)

    def __post_init__(self):
        x = np.ones(self.background.dim) if self.x is None else np.asarray(self.x, dtype=float)
        if x.shape != (self.background.dim,):
            raise ParameterError(f"expected {self.background.dim} diagonal entries")
        if np.any(x <= 0):
            raise ParameterError("metric entries must be positive")
        object.__setattr__(self, "x", x)

    @property
    def algebra(self) -> StructureAlgebra:
        return self.background.algebra


def group_metric(algebra: StructureAlgebra, x=None, gb_scale=()) -> GroupMetric:
    return GroupMetric(GroupBackground(algebra, tuple(gb_scale)), x)


# ---------------------------------------------------------------------------
# closed formulas


def hb_squared(metric: GroupMetric) -> np.ndarray:
    x = metric.x
    return np.einsum("klij,i,j->kl", metric.background.cc, 1 / x, 1 / x)


def ricci_group(metric: GroupMetric) -> np.ndarray:
    x = metric.x
    bg = metric.background
    xi, xj = x[:, None], x[None, :]
    num = (xi**2 + xj**2)[None, None] - np.multiply.outer(x, x)[:, :, None, None]
    return -0.5 * bg.killing - 0.25 * np.sum(bg.cc * num / (xi * xj)[None, None], axis=(2, 3))


def brf_group_equations(metric: GroupMetric) -> np.ndarray:
    """Left-hand sides of the BRF equations for (g, H_b), one entry per (k, l)."""
    x = metric.x
    bg = metric.background
    xi, xj = x[:, None], x[None, :]
    num = ((xi - xj) ** 2)[None, None] - np.multiply.outer(x, x)[:, :, None, None] + 1
    return np.sum(bg.cc * num / (xi * xj)[None, None], axis=(2, 3))


def brf_group_relative(metric: GroupMetric) -> np.ndarray:
    """The equations divided by the same sums with absolute values (bounded by 1 in modulus).

    Used for root finding, where the raw ratios x_i/x_j let Newton run off
    to infinity along one ideal.
    """
    x = metric.x
    bg = metric.background
    xi, xj = x[:, None], x[None, :]
    sq = ((xi - xj) ** 2)[None, None]
    kl = np.multiply.outer(x, x)[:, :, None, None]
    num = np.sum(bg.cc * (sq - kl + 1) / (xi * xj)[None, None], axis=(2, 3))
    den = np.sum(np.abs(bg.cc) * (sq + kl + 1) / (xi * xj)[None, None], axis=(2, 3))
    return num / np.where(den > 0, den, 1.0)


def brf_group_diagonal(metric: GroupMetric) -> np.ndarray:
    """Diagonal equations written as sum c_ij^k^2 ((x_i-x_j)^2 + 1 - x_k^2)/(x_i x_j)."""
    x = metric.x
    c2 = metric.background.structure ** 2  # c2[i,j,k]
    xi, xj = x[:, None], x[None, :]
    out = np.empty(x.size)
    for k in range(x.size):
        out[k] = np.sum(c2[:, :, k] * ((xi - xj) ** 2 + 1 - x[k] ** 2) / (xi * xj))
    return out


# ---------------------------------------------------------------------------
# generic oracles (trivial isotropy)


def ricci_group_bruteforce(metric: GroupMetric) -> np.ndarray:
    bg = metric.background
    return ricci_from_structure(bg.structure, bg.killing, metric.x)


def hb_squared_bruteforce(metric: GroupMetric) -> np.ndarray:
    # H_b(e_a, e_b, e_c) = g_b([e_a, e_b], e_c) is the structure tensor itself
    return h_squared_from_coeffs(metric.background.structure, metric.x)


def hb_codifferential(metric: GroupMetric) -> np.ndarray:
    bg = metric.background
    return codifferential_from_structure(bg.structure, bg.structure, metric.x)


def identity_defect(metric: GroupMetric, sign: float) -> float:
    """max |ric - H_b^2/4 - sign * brf1 / 4|."""
    lhs = ricci_group(metric) - 0.25 * hb_squared(metric)
    return float(np.abs(lhs - 0.25 * sign * brf_group_equations(metric)).max(initial=0.0))


# ---------------------------------------------------------------------------
# exact identity sum c_ij^k c_ij^l = -B(e_k, e_l)


def casimir_identity_exact(algebra: StructureAlgebra) -> bool:
    """Basis-free form of sum c_ij^k c_ij^l = -B_kl, checked in rational arithmetic.

    In the given basis with G = -B and lowered constants C_k[i,j] = G([e_i,e_j], e_k)
    the statement reads tr(G^-1 C_k G^-1 C_l^T) = G_kl.
    """
    n = algebra.dim
    g = -algebra.killing_exact
    if exact.rank(g) < n:
        raise ParameterError("Killing form is degenerate")
    ginv = g.inv()
    cq = [exact.qmat_from_int(algebra.c_num[:, :, m], algebra.c_den) for m in range(n)]
    # lowered: C_k = sum_m c[:, :, m] G[m, k]
    low = []
    for k in range(n):
        acc = flint.fmpq_mat(n, n)
        for m in range(n):
            if g[m, k] != 0:
                acc += cq[m] * g[m, k]
        low.append(acc)
    left = [ginv * ck * ginv for ck in low]
    for k in range(n):
        ak = left[k].entries()
        for l in range(k, n):
            val = sum((a * b for a, b in zip(ak, low[l].entries())), flint.fmpq(0))
            if val != g[k, l]:
                return False
    return True


# ---------------------------------------------------------------------------
# rigidity search


def hull_check(x: np.ndarray, tol: float = 1e-8) -> dict:
    """x_max^2 - 1 <= (x_min - x_max)^2, with equality forced at BRF solutions."""
    lo, hi = float(np.min(x)), float(np.max(x))
    lhs, rhs = hi**2 - 1, (lo - hi) ** 2
    return {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs + tol, "equality": abs(lhs - rhs) <= tol}


def verify_rigidity(
    algebra: StructureAlgebra,
    trials: int = 100,
    seed: int = 0,
    gb_scale=(),
    cfg: MultistartConfig | None = None,
) -> dict:
    """Multistart Newton on the diagonal BRF equations for (g, H_b)."""
    cfg = cfg or MultistartConfig(starts=trials, seed=seed)
    bg = GroupBackground(algebra, tuple(gb_scale))
    report = {"algebra": algebra.name, "trials": trials, "seed": seed, "gb_scale": list(bg.gb_scale)}
    if bg.abelian:
        report.update(degenerate=True, solutions_found=None, status="degenerate", max_residual=0.0)
        return report
    n = bg.dim
    iu = np.triu_indices(n)

    def f(x):
        return brf_group_relative(GroupMetric(bg, x))[iu]

    rng = np.random.default_rng(seed)
    starts = np.exp(rng.uniform(np.log(cfg.low), np.log(cfg.high), size=(trials, n)))
    found, worst, conv, esc = [], 0.0, 0, 0
    for x0 in starts:
        res = damped_newton(f, x0, cfg.max_iter, cfg.residual_tol)
        if not res.converged:
            continue
        if np.any(res.x < cfg.low * 1e-3) or np.any(res.x > cfg.high * 1e3):
            esc += 1
            continue
        conv += 1
        found.append(res.x)
        worst = max(worst, float(np.abs(brf_group_equations(GroupMetric(bg, res.x))).max()))
    sols = dedupe(found, cfg.dedupe_rel)
    ones = np.ones(n)
    others = [s for s in sols if np.linalg.norm(s - ones) > cfg.dedupe_rel * np.sqrt(n)]
    hulls = [hull_check(s) for s in sols]
    report.update(
        degenerate=False,
        converged=conv,
        escaped=esc,
        diverged=trials - conv - esc,
        solutions_found=len(sols),
        solutions=[s.tolist() for s in sols],
        max_residual=worst,
        hull=hulls,
        status="CRITICAL" if others or not all(h["holds"] and h["equality"] for h in hulls) else "ok",
    )
    return report


# ---------------------------------------------------------------------------
# bi-invariant metric with H = y1 H_1 + y2 H_2


def cartan_scan(algebra: StructureAlgebra, gb_scale, y_grid=None) -> list[list[float]]:
    """Roots y of ric(g_b) = H^2/4 for H = y H_i on each ideal, by scanning and bracketing.

    H_i is the Cartan form of -B on the i-th ideal; only y = +-z_i should appear.
    """
    bg = GroupBackground(algebra, tuple(gb_scale))
    if y_grid is None:
        y_grid = np.linspace(-3 * max(bg.gb_scale), 3 * max(bg.gb_scale), 601)
    ric = ricci_from_structure(bg.structure, bg.killing, np.ones(bg.dim))
    roots = []
    for (s, t), z in zip(bg.ideals, bg.gb_scale):
        # -B([e_a,e_b],e_c) = g_b([e_a,e_b],e_c) / z on this ideal
        h = np.zeros_like(bg.structure)
        h[s:t, s:t, s:t] = bg.structure[s:t, s:t, s:t] / z
        h2 = h_squared_from_coeffs(h, np.ones(bg.dim))
        k = s

        def f(y, k=k, h2=h2):
            return ric[k, k] - 0.25 * y * y * h2[k, k]

        vals = [f(y) for y in y_grid]
        found = []
        for a, b, fa, fb in zip(y_grid[:-1], y_grid[1:], vals[:-1], vals[1:]):
            if fa == 0:
                found.append(float(a))
            elif fa * fb < 0:
                found.append(float(brentq(f, a, b, xtol=1e-14)))
        roots.append(found)
    return roots


def su2() -> StructureAlgebra:
    return build_classical("su", 2)


def su2_su2() -> StructureAlgebra:
    a = build_classical("su", 2)
    return direct_sum(a, a)


def abelian(n: int) -> StructureAlgebra:
    return StructureAlgebra(
        name=f"R^{n}",
        labels=tuple(f"t{i+1}" for i in range(n)),
        c_num=np.zeros((n, n, n), dtype=np.int64),
        ideals=((0, n),),
    )

