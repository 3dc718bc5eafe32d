"""Damped Gauss-Newton with backtracking and multistart driver.

Unknowns are positive, so iterations run in log coordinates u = log x.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import MultistartConfig


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: float
    iterations: int
    converged: bool


def fd_jacobian(f: Callable[[np.ndarray], np.ndarray], u: np.ndarray, f0: np.ndarray, h: float = 1e-7) -> np.ndarray:
    jac = np.empty((f0.size, u.size))
    for i in range(u.size):
        step = h * max(1.0, abs(u[i]))
        up, um = u.copy(), u.copy()
        up[i] += step
        um[i] -= step
        jac[:, i] = (f(up) - f(um)) / (2 * step)
    return jac


def damped_newton(
    f: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    max_iter: int = 200,
    tol: float = 1e-10,
) -> NewtonResult:
    """Minimize |f(x)| for x > 0; f may be overdetermined (least-squares steps)."""

    def g(u):
        return np.asarray(f(np.exp(u)), dtype=float)

    u = np.log(np.asarray(x0, dtype=float))
    r = g(u)
    nr = float(np.linalg.norm(r))
    for it in range(1, max_iter + 1):
        if not np.isfinite(nr):
            return NewtonResult(np.exp(u), np.inf, it, False)
        if nr < tol:
            return NewtonResult(np.exp(u), nr, it - 1, True)
        jac = fd_jacobian(g, u, r)
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        t = 1.0
        while t > 1e-8:
            cand = u + t * step
            if np.all(np.abs(cand) < 50):
                rc = g(cand)
                nc = float(np.linalg.norm(rc))
                if np.isfinite(nc) and nc < (1 - 1e-4 * t) * nr:
                    break
            t *= 0.5
        else:
            return NewtonResult(np.exp(u), nr, it, nr < tol)
        u, r, nr = cand, rc, nc
    return NewtonResult(np.exp(u), nr, max_iter, nr < tol)


@dataclass
class MultistartReport:
    solutions: list[np.ndarray]
    converged: int
    diverged: int
    escaped: int
    max_residual: float


def dedupe(points: list[np.ndarray], rel: float) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for p in points:
        if not any(np.linalg.norm(p - q) <= rel * max(np.linalg.norm(q), 1e-300) for q in out):
            out.append(p)
    return out


def multistart(
    f: Callable[[np.ndarray], np.ndarray],
    dim: int,
    cfg: MultistartConfig,
    starts: np.ndarray | None = None,
) -> MultistartReport:
    """Run damped Newton from log-uniform random starts in [low, high]^dim."""
    if starts is None:
        rng = np.random.default_rng(cfg.seed)
        starts = np.exp(rng.uniform(np.log(cfg.low), np.log(cfg.high), size=(cfg.starts, dim)))
    found, worst, conv, esc = [], 0.0, 0, 0
    for x0 in starts:
        res = damped_newton(f, x0, cfg.max_iter, cfg.residual_tol)
        if not res.converged:
            continue
        # a vanishing residual while running off to 0 or infinity is not a solution
        if np.any(res.x < cfg.low * 1e-3) or np.any(res.x > cfg.high * 1e3):
            esc += 1
            continue
        conv += 1
        found.append(res.x)
        worst = max(worst, res.residual)
    sols = dedupe(found, cfg.dedupe_rel)
    return MultistartReport(sols, conv, len(starts) - conv - esc, esc, worst)


class NumericalFailure(RuntimeError):
    """A root or bracket could not be found within the configured limits."""


def bisect_increasing(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    max_expand: int = 80,
    max_iter: int = 300,
) -> float:
    """Root of f with f(0+) < 0 < f(inf), by geometric bracket expansion and bisection."""
    flo, fhi = f(lo), f(hi)
    n = 0
    while flo >= 0 and n < max_expand:
        lo, flo, n = lo / 2, f(lo / 2), n + 1
    n = 0
    while fhi <= 0 and n < max_expand:
        hi, fhi, n = hi * 2, f(hi * 2), n + 1
    if not (flo < 0 < fhi):
        raise NumericalFailure(f"no sign change on [{lo:g}, {hi:g}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if fm < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
