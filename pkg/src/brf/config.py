"""Tolerance and run configuration shared across modules."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    compare: float = 1e-9  # closed form vs oracle comparisons
    construct: float = 1e-12  # construction residuals (Jacobi, orthonormality)
    scalar: float = 1e-10  # detecting scalar Casimir / block operators
    rank: float = 1e-9  # numerical rank decisions (relative singular values)

    def with_compare(self, tol: float) -> "Tolerances":
        return replace(self, compare=tol)


def default_tolerances() -> Tolerances:
    env = os.environ.get("BRF_TOL")
    if env:
        return Tolerances(compare=float(env))
    return Tolerances()


@dataclass(frozen=True)
class MultistartConfig:
    starts: int = 50
    low: float = 0.05
    high: float = 20.0
    max_iter: int = 200
    dedupe_rel: float = 1e-6
    residual_tol: float = 1e-10
    seed: int = 0


@dataclass(frozen=True)
class FlowConfig:
    t_end: float = 1.0
    h0: float = 1e-2
    local_tol: float = 1e-8
    h_min: float = 1e-10
    max_steps: int = 200_000
    blowup: float = 1e6
    equilibrium_tol: float = 1e-12
    harmonic_tol: float = 1e-8
    check_harmonic_every: int = 1
