"""The superseded three-parameter BRF system and its implicit solution curve.

This system used an H^2 block on p3 that is off by a factor 1/sqrt(B4).
It is kept to reproduce the numbers computed from it and to show where it
disagrees with the corrected equations.  Everything here is labelled
mode="legacy".

Hypotheses: scalar Casimirs kappa1, kappa2 on p1, p2 and a single lambda
for all ideals of k.  Then x1 and x2 are explicit functions of (x3, z1) and
the p3 equation becomes one scalar equation F(x3, z1) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
import sympy as sp

from .aligned import AlignedModel, AlignedSpace, UnsupportedSpace, as_number
from .curvature import DiagonalMetric
from .newton import NumericalFailure, bisect_increasing
from .curvature import h_squared_p3_value
from .solver import brf_residual, canonical_solution, gk_coordinates, solve_x1, solve_x2


class SingularPoint(ArithmeticError):
    pass


def _model(obj) -> AlignedModel:
    if isinstance(obj, AlignedSpace):
        return obj.model
    if isinstance(obj, AlignedModel):
        return obj
    raise TypeError("expected an AlignedModel or AlignedSpace")


def _rat(v) -> sp.Rational:
    v = Fraction(v)
    return sp.Rational(v.numerator, v.denominator)


def _exact_or_float(e):
    e = sp.nsimplify(e) if not e.is_Rational else e
    if e.is_Rational:
        return Fraction(int(e.p), int(e.q))
    return float(e)


def _is_exact(*vals) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in vals)


@dataclass(frozen=True)
class LegacyConstants:
    c1: Fraction
    c2: Fraction
    lam: Fraction
    kappa1: Fraction
    kappa2: Fraction

    @classmethod
    def of(cls, obj) -> "LegacyConstants":
        m = _model(obj)
        if len(set(m.lambdas)) != 1:
            raise UnsupportedSpace(f"{m.name}: legacy equations need a single lambda on all of k")
        if m.kappa1 is None or m.kappa2 is None:
            raise UnsupportedSpace(f"{m.name}: legacy equations need scalar Casimirs on p1 and p2")
        return cls(m.c1, m.c2, m.lambdas[0], m.kappa1, m.kappa2)


class LegacySystem:
    """Symbolic F(x3, z1), its partials and the Ricci eigenvalue ratios along x1(x3,z1), x2(x3,z1)."""

    x3, z = sp.symbols("x3 z1", positive=True)

    def __init__(self, obj):
        self.model = _model(obj)
        self.k = LegacyConstants.of(self.model)

    # -- symbolic pieces ---------------------------------------------------
    def _root(self, kappa):
        x3, z = self.x3, self.z
        kap = _rat(kappa)
        s = x3 / (z + 1) + (z + 1) / (x3 * z**2)
        return (kap * s + sp.sqrt(kap**2 * s**2 + (1 - 4 * kap**2) / z**2)) / (2 * kap + 1)

    @cached_property
    def x1(self):
        return self._root(self.k.kappa1)

    @cached_property
    def x2(self):
        return self.z * self._root(self.k.kappa2)

    @cached_property
    def F(self):
        x3, z = self.x3, self.z
        c1, c2, lam = _rat(self.k.c1), _rat(self.k.c2), _rat(self.k.lam)
        p = (1 / c1 - lam) / self.x1**2 + (1 / c2 - lam) * z**2 / self.x2**2
        tail = z**2 - z + 1 + 3 * sp.sqrt(c1) * z / sp.sqrt(z + 1)
        return p * x3**4 + (lam * (z + 1) ** 2 - ((z + 1) ** 2 / z**2) * p) * x3**2 - (lam / z**2) * tail**2

    @cached_property
    def Fx(self):
        return sp.diff(self.F, self.x3)

    @cached_property
    def Fz(self):
        return sp.diff(self.F, self.z)

    def ricci_expr(self, x1, x2, x3, z):
        c1, c2, lam = _rat(self.k.c1), _rat(self.k.c2), _rat(self.k.lam)
        k1, k2 = _rat(self.k.kappa1), _rat(self.k.kappa2)
        r1 = (2 * k1 + 1 - 2 * x3 * k1 / (x1 * (z + 1))) / (4 * x1 * z)
        r2 = (c1 - 1) / (4 * x2) * (2 * k2 + 1 - 2 * x3 * z * k2 / (x2 * (z + 1)))
        r3 = c1 / (4 * x3 * z * (z + 1)) * (
            lam * (z + 1) ** 2 + (1 / c1 - lam) * x3**2 / x1**2 + (1 / c2 - lam) * x3**2 * z**2 / x2**2
        )
        return r1, r2, r3

    @cached_property
    def ratios(self):
        r1, r2, r3 = self.ricci_expr(self.x1, self.x2, self.x3, self.z)
        return r1 / r2, r1 / r3

    @cached_property
    def _num(self):
        args = (self.x3, self.z)
        r12, r13 = self.ratios
        return {
            name: sp.lambdify(args, e, "math")
            for name, e in (("F", self.F), ("Fx", self.Fx), ("Fz", self.Fz), ("r12", r12), ("r13", r13))
        }

    # -- evaluation --------------------------------------------------------
    def evaluate(self, name: str, x3, z1):
        """Exact (Fraction, when the radicals resolve) for rational input, float otherwise."""
        x3, z1 = as_number(x3), as_number(z1)
        if _is_exact(x3, z1):
            e = getattr(self, name) if name in ("F", "Fx", "Fz") else dict(zip(("r12", "r13"), self.ratios))[name]
            return _exact_or_float(e.subs({self.x3: _rat(x3), self.z: _rat(z1)}))
        return self._num[name](float(x3), float(z1))

    def total_derivative(self, name: str, x3, z1, x3p):
        """d/dz1 of r12 or r13 along the curve, by the chain rule."""
        e = dict(zip(("r12", "r13"), self.ratios))[name]
        x3, z1 = as_number(x3), as_number(z1)
        if _is_exact(x3, z1, x3p):
            at = {self.x3: _rat(x3), self.z: _rat(z1)}
            dz = _exact_or_float(sp.diff(e, self.z).subs(at))
            dx = _exact_or_float(sp.diff(e, self.x3).subs(at))
            if _is_exact(dz, dx):
                return dz + x3p * dx
            return float(dz) + float(x3p) * float(dx)
        f = sp.lambdify((self.x3, self.z), (sp.diff(e, self.z), sp.diff(e, self.x3)), "math")
        dz, dx = f(float(x3), float(z1))
        return dz + float(x3p) * dx


_SYSTEMS: dict[int, LegacySystem] = {}


def legacy_system(obj) -> LegacySystem:
    m = _model(obj)
    key = id(m)
    if key not in _SYSTEMS or _SYSTEMS[key].model is not m:
        _SYSTEMS[key] = LegacySystem(m)
    return _SYSTEMS[key]


# ---------------------------------------------------------------------------
# public operations


def legacy_F(x3, z1, obj):
    return legacy_system(obj).evaluate("F", x3, z1)


def legacy_partials(obj, x3, z1) -> tuple:
    sysm = legacy_system(obj)
    return sysm.evaluate("Fx", x3, z1), sysm.evaluate("Fz", x3, z1)


def legacy_partials_fd(obj, x3, z1, h: float = 1e-5) -> tuple[float, float]:
    """Central finite differences of legacy_F (independent of the symbolic derivative)."""
    f = legacy_system(obj)._num["F"]
    x3, z1 = float(x3), float(z1)
    fx = (f(x3 + h, z1) - f(x3 - h, z1)) / (2 * h)
    fz = (f(x3, z1 + h) - f(x3, z1 - h)) / (2 * h)
    return fx, fz


def canonical_point(obj) -> tuple[Fraction, Fraction]:
    """(x3, z1) = (c1/(c1-1), c1-1), where the legacy curve meets the corrected solution."""
    m = _model(obj)
    return m.c1 / (m.c1 - 1), m.c1 - 1


def legacy_solve(obj, z1, tol: float = 1e-12) -> float:
    """x3 on the legacy curve over z1 (bracketing bisection, then Newton polish)."""
    sysm = legacy_system(obj)
    f, fx = sysm._num["F"], sysm._num["Fx"]
    z = float(z1)
    root = bisect_increasing(lambda t: f(t, z), 0.5, 4.0)
    for _ in range(5):
        d = fx(root, z)
        if d == 0:
            break
        step = f(root, z) / d
        root -= step
        if abs(step) <= 1e-16 * root:
            break
    if not abs(f(root, z)) < tol:
        raise NumericalFailure(f"legacy F residual {abs(f(root, z)):.2e} at z1={z}")
    return root


def implicit_derivative(obj, z1_star, x3=None):
    """x3'(z1) = -F_z / F_x3 on the legacy curve.

    Exact when z1_star is rational and x3 is known exactly, which holds at the
    canonical point z1 = c1 - 1 (x3 = c1/(c1-1)).
    """
    z1_star = as_number(z1_star)
    if x3 is None:
        x3c, zc = canonical_point(obj)
        x3 = x3c if z1_star == zc else legacy_solve(obj, z1_star)
    fx, fz = legacy_partials(obj, x3, z1_star)
    if fx == 0:
        raise SingularPoint("dF/dx3 vanishes; the implicit curve is not a graph here")
    return -fz / fx


def legacy_point(obj, z1) -> DiagonalMetric:
    """(x1, x2, x3) on the legacy curve."""
    k = LegacyConstants.of(obj)
    z1 = as_number(z1)
    x3c, zc = canonical_point(obj)
    x3 = x3c if z1 == zc else legacy_solve(obj, z1)
    return DiagonalMetric(z1, solve_x1(x3, z1, k.kappa1), solve_x2(x3, z1, k.kappa2), x3)


def ricci_ratios(obj, metric: DiagonalMetric) -> dict:
    """Legacy closed-form Ricci eigenvalues r1, r2, r3 and the ratios r12 = r1/r2, r13 = r1/r3."""
    sysm = legacy_system(obj)
    x1, x2, x3, z = metric.x1, metric.x2, metric.x3, metric.z1
    exact = _is_exact(x1, x2, x3, z)
    if exact:
        vals = [_exact_or_float(e) for e in sysm.ricci_expr(_rat(x1), _rat(x2), _rat(x3), _rat(z))]
    else:
        vals = [float(r) for r in sysm.ricci_expr(*(float(v) for v in (x1, x2, x3, z)))]
    r1, r2, r3 = vals
    if r2 == 0 or r3 == 0:
        raise ZeroDivisionError("vanishing Ricci eigenvalue; ratio undefined")
    return {"r1": r1, "r2": r2, "r3": r3, "r12": r1 / r2, "r13": r1 / r3, "mode": "legacy"}


def ratio_derivatives(obj, z1, h: float = 1e-5) -> dict:
    """r12'(z1), r13'(z1) by the chain rule, with a finite-difference cross-check."""
    sysm = legacy_system(obj)
    z1 = as_number(z1)
    x3c, zc = canonical_point(obj)
    x3 = x3c if z1 == zc else legacy_solve(obj, z1)
    x3p = implicit_derivative(obj, z1, x3)
    out = {"z1": z1, "x3": x3, "x3_prime": x3p, "mode": "legacy"}
    for name in ("r12", "r13"):
        out[name + "_prime"] = sysm.total_derivative(name, x3, z1, x3p)
        zf = float(z1)
        fwd = sysm._num[name](legacy_solve(obj, zf + h), zf + h)
        bwd = sysm._num[name](legacy_solve(obj, zf - h), zf - h)
        out[name + "_prime_fd"] = (fwd - bwd) / (2 * h)
    return out


# ---------------------------------------------------------------------------
# comparison with the corrected system


def corrigendum_report(model: AlignedModel, z1_grid) -> list[dict]:
    """Per z1: legacy curve point and its true BRF residual, corrected g_K triple, p3 H^2 delta."""
    rows = []
    for z1 in sorted((as_number(z) for z in z1_grid), key=float):
        space = model.at(z1)
        pt = legacy_point(model, z1)
        ptf = DiagonalMetric(float(z1), *(float(v) for v in pt.x))
        spf = model.at(float(z1)) if not isinstance(z1, float) else space
        corrected = canonical_solution(space, z1)
        deltas = [
            abs(
                float(h_squared_p3_value(spf, ptf, lam, "legacy"))
                - float(h_squared_p3_value(spf, ptf, lam, "corrected"))
            )
            for lam in sorted(set(model.lambdas))
        ]
        rows.append(
            {
                "z1": z1,
                "mode": "legacy",
                "legacy_point": pt.x,
                "legacy_residual": brf_residual(spf, ptf),
                "corrected_gk": corrected.gk_coordinates,
                "corrected_residual": corrected.residual,
                "legacy_gk": gk_coordinates(spf, ptf),
                "h2_p3_delta": max(deltas),
            }
        )
    return rows
