"""Generalized Ricci flow on the diagonal family (x1, x2, x3)_{g_b}.

    d/dt g = -2 Ric(g) + H^2_g / 2,    d/dt H = -dd*H

H = s H_0 is harmonic for every diagonal metric, so it stays frozen; this is
re-checked along the trajectory.  The metric equation is diagonal in the
family only when the Casimirs are scalar and lambda is uniform, which is
enforced both upfront and at runtime.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .aligned import AlignedSpace, UnsupportedSpace
from .config import FlowConfig
from .curvature import DiagonalMetric, codifferential, h_squared_closed, hq_form, ricci_closed
from .solver import canonical_metric


@dataclass(frozen=True)
class FlowState:
    t: float
    x: tuple[float, float, float]
    h_scale: float = 1.0


@dataclass
class Trajectory:
    states: list[FlowState]
    residuals: list[float]
    status: str  # "completed", "equilibrium", "positivity", "blowup", "max_steps", "step_underflow"
    harmonic_max: float = 0.0
    rejected: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def final(self) -> FlowState:
        return self.states[-1]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x1", "x2", "x3", "residual"])
            for s, r in zip(self.states, self.residuals):
                w.writerow([f"{s.t:.12e}", *(f"{v:.12e}" for v in s.x), f"{r:.6e}"])


def _check_supported(space: AlignedSpace) -> None:
    m = space.model
    if len(set(m.lambdas)) != 1:
        raise UnsupportedSpace(f"{m.name}: flow needs a single lambda on all of k (center included)")
    if (m.dims[0] and m.kappa1 is None) or (m.dims[1] and m.kappa2 is None):
        raise UnsupportedSpace(f"{m.name}: flow needs scalar Casimirs on p1 and p2")


def _block_scalars(mat: np.ndarray, space: AlignedSpace, tol: float) -> np.ndarray:
    out = []
    for name in ("p1", "p2", "p3"):
        blk = mat[space.slices[name], space.slices[name]]
        if blk.size == 0:
            out.append(0.0)
            continue
        v = float(np.mean(np.diag(blk)))
        if np.abs(blk - v * np.eye(blk.shape[0])).max() > tol * max(1.0, abs(v)):
            raise UnsupportedSpace(f"{name} block of the flow is not scalar")
        out.append(v)
    return np.array(out)


def flow_rhs(space: AlignedSpace, state: FlowState, tol: float = 1e-9) -> np.ndarray:
    """(dx1, dx2, dx3): block scalars of -2 Ric + H^2/2 on g_b-unit vectors."""
    _check_supported(space)
    metric = DiagonalMetric(float(space.z1), *state.x)
    ric = ricci_closed(space, metric).matrix
    h2 = h_squared_closed(space, metric, "corrected").matrix * state.h_scale**2
    return _block_scalars(-2 * ric + 0.5 * h2, space, tol)


def brf_operator_residual(space: AlignedSpace, state: FlowState) -> float:
    """max |4 Ric - H^2| as an operator (g-orthonormal frame)."""
    rhs = flow_rhs(space, state)
    # -2 ric + h2/2 = -(4 ric - h2)/2 on g_b-units; divide by x for the operator
    return float(np.max(np.abs(2 * rhs / np.array(state.x))))


def harmonic_residual(space: AlignedSpace, state: FlowState) -> float:
    metric = DiagonalMetric(float(space.z1), *state.x)
    h = hq_form(space).scale(state.h_scale)
    return float(np.abs(codifferential(space, metric, h)).max(initial=0.0))


# ---------------------------------------------------------------------------
# RK4


def rk4_step(f: Callable[[float, np.ndarray], np.ndarray], t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + h / 2, y + h / 2 * k1)
    k3 = f(t + h / 2, y + h / 2 * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_fixed(f, y0, t_end: float, n: int) -> np.ndarray:
    y = np.asarray(y0, dtype=float)
    h = t_end / n
    for i in range(n):
        y = rk4_step(f, i * h, y, h)
    return y


def _adaptive_step(f, t, y, h):
    """One step with step-doubling error estimate; returns (y_new, err)."""
    full = rk4_step(f, t, y, h)
    half = rk4_step(f, t, y, h / 2)
    two = rk4_step(f, t + h / 2, half, h / 2)
    err = float(np.max(np.abs(two - full))) / 15.0
    return two, err


def integrate(
    space: AlignedSpace,
    x0,
    t_end: float | None = None,
    cfg: FlowConfig | None = None,
    h_scale: float = 1.0,
) -> Trajectory:
    """Adaptive RK4 from x0 with step halving whenever the local error exceeds cfg.local_tol."""
    cfg = cfg or FlowConfig()
    t_end = cfg.t_end if t_end is None else t_end
    _check_supported(space)
    y = np.asarray([float(v) for v in x0])
    if np.any(y <= 0):
        raise ValueError("initial metric must be positive")

    def f(_t, v):
        if np.any(v <= 0):
            return np.full(3, np.nan)
        return flow_rhs(space, FlowState(_t, tuple(v), h_scale))

    t, h = 0.0, cfg.h0
    states = [FlowState(t, tuple(float(v) for v in y), h_scale)]
    residuals = [brf_operator_residual(space, states[0])]
    hmax = harmonic_residual(space, states[0])
    rejected = 0
    status = "completed"
    steps = 0
    if np.max(np.abs(f(t, y))) < cfg.equilibrium_tol:
        return Trajectory(states, residuals, "equilibrium", hmax)
    while t < t_end:
        if steps >= cfg.max_steps:
            status = "max_steps"
            break
        h = min(h, t_end - t)
        y_new, err = _adaptive_step(f, t, y, h)
        if not np.all(np.isfinite(y_new)) or np.any(y_new <= 0):
            if h / 2 < cfg.h_min:
                status = "positivity"
                break
            h /= 2
            rejected += 1
            continue
        if err > cfg.local_tol:
            if h / 2 < cfg.h_min:
                status = "step_underflow"
                break
            h /= 2
            rejected += 1
            continue
        t, y = t + h, y_new
        steps += 1
        st = FlowState(t, tuple(float(v) for v in y), h_scale)
        states.append(st)
        residuals.append(brf_operator_residual(space, st))
        if cfg.check_harmonic_every and steps % cfg.check_harmonic_every == 0:
            hmax = max(hmax, harmonic_residual(space, st))
            if hmax > cfg.harmonic_tol:
                status = "not_harmonic"
                break
        if np.max(y) > cfg.blowup:
            status = "blowup"
            break
        if np.max(np.abs(f(t, y))) < cfg.equilibrium_tol:
            status = "equilibrium"
            break
        if err < cfg.local_tol / 32:
            h *= 2
    return Trajectory(states, residuals, status, hmax, rejected)


def canonical_state(space: AlignedSpace, scale: float = 1.0) -> FlowState:
    """c g0 with torsion c H0: a BRF pair for every c > 0."""
    g0 = canonical_metric(space.z1)
    return FlowState(0.0, tuple(float(v) * scale for v in g0.x), scale)


def linearization(space: AlignedSpace, state: FlowState, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of flow_rhs in x at a state."""
    x = np.array(state.x)
    jac = np.empty((3, 3))
    for i in range(3):
        up, dn = x.copy(), x.copy()
        up[i] += h
        dn[i] -= h
        jac[:, i] = (
            flow_rhs(space, FlowState(0.0, tuple(up), state.h_scale))
            - flow_rhs(space, FlowState(0.0, tuple(dn), state.h_scale))
        ) / (2 * h)
    return jac

