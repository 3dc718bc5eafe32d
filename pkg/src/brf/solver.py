"""BRF metrics on aligned spaces: canonical solution, residuals, uniqueness.

The BRF condition for (g, H) is 4 Ric(g) = H^2_g together with dH = 0 and
delta_g H = 0.  For H = H_Q0 and diagonal g the equations reduce to one
scalar equation per Casimir eigenspace of p1 and p2 and one per p3-block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .aligned import AlignedModel, AlignedSpace, as_number
from .config import MultistartConfig
from .exact import sqrt_fraction
from .curvature import (
    DiagonalMetric,
    InvariantThreeForm,
    codifferential,
    exterior_derivative,
    h_squared_bruteforce,
    h_squared_p3_value,
    hq_form,
    ricci_bruteforce,
    ricci_eigenvalues_exact,
    ricci_p3_eigenvalue,
)
from .liealg import ParameterError
from .newton import multistart


class InconsistentModel(RuntimeError):
    pass


@dataclass(frozen=True)
class BrfSolution:
    metric: DiagonalMetric
    residual: float
    mode: str
    gk_coordinates: tuple
    gk_numeric: tuple[float, float, float]
    certificate: dict | None = field(default=None, compare=False)


def _space(obj, z1) -> AlignedSpace:
    if isinstance(obj, AlignedModel):
        return obj.at(z1)
    if isinstance(obj, AlignedSpace):
        if as_number(z1) != obj.z1:
            return obj.model.at(z1)
        return obj
    raise TypeError("expected an AlignedModel or AlignedSpace")


def canonical_metric(z1) -> DiagonalMetric:
    z1 = as_number(z1)
    return DiagonalMetric(z1, 1 / z1, z1 / z1, (z1 + 1) / z1)


# ---------------------------------------------------------------------------
# residuals


def brf_residual_parts(space: AlignedSpace, metric: DiagonalMetric, h: InvariantThreeForm | None = None) -> dict:
    """Max-norms of 4Ric - H^2 (as an operator), dH and delta H, all in g-orthonormal frames."""
    if h is None:
        h = hq_form(space)
    w = metric.weights(space)
    ric = ricci_bruteforce(space, metric)
    h2 = h_squared_bruteforce(space, metric, h)
    rop = (ric.scale(4.0) - h2).operator(w)
    sw = np.sqrt(w)
    dh = exterior_derivative(space, h)
    dh_on = dh / (sw[:, None, None, None] * sw[None, :, None, None] * sw[None, None, :, None] * sw[None, None, None, :])
    delta = codifferential(space, metric, h)
    return {
        "ricci": float(np.abs(rop).max(initial=0.0)),
        "closed": float(np.abs(dh_on).max(initial=0.0)),
        "coclosed": float(np.abs(delta).max(initial=0.0)),
    }


def brf_residual(space: AlignedSpace, metric: DiagonalMetric, h: InvariantThreeForm | None = None) -> float:
    return max(brf_residual_parts(space, metric, h).values())


# ---------------------------------------------------------------------------
# g_K coordinates and homothety invariants


def gk_coordinates(space: AlignedSpace, metric: DiagonalMetric) -> tuple:
    """(y1, y2, y3) with g = (y1, y2, y3) w.r.t. the standard metric -B_g on its own complement.

    p1, p2 already lie in the -B_g complement of k, so y1 = x1 z1 and
    y2 = x2 z2.  A p3 vector (Z1, A3 Z2) projects along k onto a multiple of
    (Z1, -Z2/(c1-1)); comparing norms gives y3 = x3 c1 z1 / ((c1-1)(z1+1)).
    """
    c1 = space.c1
    z1 = metric.z1
    if not isinstance(z1, Fraction) or not all(isinstance(v, Fraction) for v in metric.x):
        c1 = float(c1)
    y1 = metric.x1 * z1
    y2 = metric.x2 / (c1 - 1)
    y3 = metric.x3 * c1 * z1 / ((c1 - 1) * (z1 + 1))
    return (y1, y2, y3)


def gk_coordinates_numeric(space: AlignedSpace, metric: DiagonalMetric) -> tuple[float, float, float]:
    """Same triple, computed by projecting the adapted p-basis along k onto the -B_g complement."""
    f = space.model._float
    bg = f["bg"]
    kmat = f["z"]  # spans k
    e = space.basis[:, : space.np]
    # projection along k onto the (-B_g)-orthogonal complement of k
    gram = kmat.T @ (-bg) @ kmat
    proj = e - kmat @ np.linalg.solve(gram, kmat.T @ (-bg) @ e)
    gk = proj.T @ (-bg) @ proj
    w = metric.weights(space)
    out = []
    for name in ("p1", "p2", "p3"):
        sl = space.slices[name]
        blk = gk[sl, sl]
        if blk.size == 0:
            out.append(float("nan"))
            continue
        # g = y g_K on the block; g(e,e) = x for g_b-unit e
        out.append(float(np.mean(w[sl] / np.diag(blk))))
    return tuple(out)


def ricci_spectrum(space: AlignedSpace, metric: DiagonalMetric) -> np.ndarray:
    ric = ricci_bruteforce(space, metric)
    return np.sort(np.linalg.eigvalsh(ric.operator(metric.weights(space))))


def homothety_invariants(space: AlignedSpace, metric: DiagonalMetric, digits: int = 10) -> tuple:
    """Sorted Ricci eigenvalues (with multiplicity) divided by the one of largest modulus."""
    ev = ricci_spectrum(space, metric)
    top = ev[np.argmax(np.abs(ev))]
    if top == 0:
        return tuple(np.zeros_like(ev))
    return tuple(np.round(ev / top, digits))


# ---------------------------------------------------------------------------
# reduced equations


def _casimir_eigenvalues(cas: np.ndarray, tol: float = 1e-8) -> list[float]:
    if cas.size == 0:
        return []
    ev = np.sort(np.linalg.eigvalsh(cas))
    groups = [ev[0]]
    for v in ev[1:]:
        if abs(v - groups[-1]) > tol:
            groups.append(v)
    return [float(g) for g in groups]


@dataclass(frozen=True)
class ReducedSystem:
    """Scalar BRF equations 4 Ric(e,e) - H^2(e,e) = 0 for g_b-unit e in each eigen-block."""

    space: AlignedSpace
    relative: bool = False

    @property
    def eig1(self) -> list[float]:
        return _casimir_eigenvalues(self.space.casimir_blocks()[0])

    @property
    def eig2(self) -> list[float]:
        return _casimir_eigenvalues(self.space.casimir_blocks()[1])

    def __call__(self, x) -> np.ndarray:
        sp = self.space
        c = sp.const
        x1, x2, x3 = (float(v) for v in x)
        z1, z2, y1, y2 = (float(v) for v in (c.z1, c.z2, c.y1, c.y2))
        a3, b3, c3, b4 = (float(v) for v in (c.A3, c.B3, c.C3, c.B4))
        c1, c2 = float(sp.c1), float(sp.c2)
        out = []
        s1 = (y1 / z1 + c3 / b4) ** 2 / (x3 * b3)
        base1 = y1**2 / (x1**2 * z1**3)
        for mu in self.eig1:
            ric = 1 / (4 * x1 * z1) + (1 / (2 * x1)) * (1 / z1 - x3 / (x1 * c1 * b3)) * mu
            h2 = (2 * s1 / (x1 * c1) - 2 * base1) * mu + base1
            out.append(self._eq(4 * x1 * ric, h2))
        s2 = (a3 * y2 / z2 + c3 / b4) ** 2 / (x3 * b3)
        base2 = y2**2 / (x2**2 * z2**3)
        for mu in self.eig2:
            ric = 1 / (4 * x2 * z2) + (1 / (2 * x2)) * (1 / z2 - x3 * a3**2 / (x2 * c2 * b3)) * mu
            h2 = (2 * s2 / (x2 * c2) - 2 * base2) * mu + base2
            out.append(self._eq(4 * x2 * ric, h2))
        metric = DiagonalMetric(sp.z1 if isinstance(sp.z1, float) else float(sp.z1), x1, x2, x3)
        for lam in sorted(set(sp.model.lambdas)):
            r = float(ricci_p3_eigenvalue(sp, metric, lam))
            out.append(self._eq(4 * x3 * r, h_squared_p3_value(sp, metric, lam, "corrected")))
        return np.array(out)

    def _eq(self, lhs: float, rhs: float) -> float:
        if self.relative:
            return (lhs - rhs) / (abs(lhs) + abs(rhs) + 1e-300)
        return lhs - rhs


# ---------------------------------------------------------------------------
# x1, x2 from x3


def _positive_root(x3, z1, kappa):
    s = x3 / (z1 + 1) + (z1 + 1) / (x3 * z1**2)
    disc = kappa**2 * s**2 + (1 - 4 * kappa**2) / z1**2
    if isinstance(disc, Fraction):
        r = sqrt_fraction(disc)
        root = r if r is not None else float(disc) ** 0.5
    else:
        root = float(np.sqrt(disc))
    return (kappa * s + root) / (2 * kappa + 1)


def _check_kappa(kappa):
    if not (0 < kappa <= Fraction(1, 2)):
        raise ParameterError("Casimir constant must lie in (0, 1/2]")


def solve_x1(x3, z1, kappa):
    """Positive root x1 of the p1 equation for a scalar Casimir kappa."""
    _check_kappa(kappa)
    return _positive_root(as_number(x3), as_number(z1), kappa)


def solve_x2(x3, z1, kappa):
    """Positive root x2 of the p2 equation for a scalar Casimir kappa."""
    _check_kappa(kappa)
    z1 = as_number(z1)
    return z1 * _positive_root(as_number(x3), z1, kappa)


# ---------------------------------------------------------------------------
# corrected system


def uniqueness_factor(model: AlignedModel, lam, x1, x2, x3, z1):
    """lambda (z1+1)^2/x3^2 + (1/c1 - lambda)/x1^2 + (1/c2 - lambda) z1^2/x2^2."""
    c1, c2 = model.c1, model.c2
    if not all(isinstance(v, Fraction) for v in (x1, x2, x3, z1)):
        c1, c2, lam = float(c1), float(c2), float(lam)
    return lam * (z1 + 1) ** 2 / x3**2 + (1 / c1 - lam) / x1**2 + (1 / c2 - lam) * z1**2 / x2**2


def positivity_certificate(model: AlignedModel, z1, metric: DiagonalMetric | None = None) -> dict:
    """Evidence that the second factor of the p3 equations cannot vanish.

    Every coefficient is non-negative and 1/c_i - lambda_l > 0 follows from
    c_il = lambda_l c_i < 1, so the factor is positive for every positive x.
    """
    z1 = as_number(z1)
    metric = metric or canonical_metric(z1)
    rows = []
    ok = True
    for b, lam in zip(model.blocks, model.lambdas):
        coeffs = (lam, 1 / model.c1 - lam, 1 / model.c2 - lam)
        val = uniqueness_factor(model, lam, metric.x1, metric.x2, metric.x3, z1)
        good = coeffs[0] >= 0 and coeffs[1] > 0 and coeffs[2] > 0 and val > 0
        ok &= bool(good)
        rows.append({"block": [b.start, b.end], "lambda": lam, "coefficients": coeffs, "value": val, "positive": bool(good)})
    return {"holds": ok, "blocks": rows}


def canonical_solution(obj, z1) -> BrfSolution:
    """The BRF metric (1/z1, 1, (z1+1)/z1) for the background g_b(z1)."""
    space = _space(obj, z1)
    g0 = canonical_metric(space.z1)
    res = brf_residual(space, g0)
    return BrfSolution(
        metric=g0,
        residual=res,
        mode="corrected",
        gk_coordinates=gk_coordinates(space, g0),
        gk_numeric=gk_coordinates_numeric(space, g0),
    )


def solve_corrected(obj, z1, search: MultistartConfig | None = None) -> tuple[list[BrfSolution], dict]:
    """All BRF metrics (x1, x2, x3)_{g_b} with H = H_Q0 for this z1.

    The p3 equations factor as (x3^2 - (z1+1)^2/z1^2) times a positive
    factor, which pins x3; x1 and x2 then follow from the p1 and p2
    equations on every Casimir eigenspace.  An optional multistart search is
    run as independent confirmation.
    """
    space = _space(obj, z1)
    model = space.model
    z1 = space.z1
    x3 = (z1 + 1) / z1
    # x1, x2 from each Casimir eigenvalue must agree
    x1s, x2s = set(), set()
    for mu in _casimir_eigenvalues(space.casimir_blocks()[0]):
        x1s.add(round(float(_positive_root(float(x3), float(z1), mu)), 12))
    for mu in _casimir_eigenvalues(space.casimir_blocks()[1]):
        x2s.add(round(float(z1 * _positive_root(float(x3), float(z1), mu)), 12))
    if len(x1s) > 1 or len(x2s) > 1:
        raise InconsistentModel("Casimir eigenspaces give different x1 or x2")
    sol = canonical_solution(space, z1)
    if x1s and abs(x1s.pop() - float(sol.metric.x1)) > 1e-9:
        raise InconsistentModel("p1 equation does not reproduce x1 = 1/z1")
    if x2s and abs(x2s.pop() - float(sol.metric.x2)) > 1e-9:
        raise InconsistentModel("p2 equation does not reproduce x2 = 1")
    cert = positivity_certificate(model, z1, sol.metric)
    if not cert["holds"]:
        raise InconsistentModel("positivity of the uniqueness factor failed")
    info = {"certificate": cert}
    if search is not None:
        rep = multistart(ReducedSystem(space, relative=True), 3, search)
        x0 = np.array([float(v) for v in sol.metric.x])
        others = [s for s in rep.solutions if np.linalg.norm(s - x0) > search.dedupe_rel * np.linalg.norm(x0)]
        info["search"] = {
            "starts": search.starts,
            "converged": rep.converged,
            "diverged": rep.diverged,
            "escaped": rep.escaped,
            "distinct": len(rep.solutions),
            "other_solutions": [s.tolist() for s in others],
        }
    sol = BrfSolution(sol.metric, sol.residual, sol.mode, sol.gk_coordinates, sol.gk_numeric, cert)
    return [sol], info


def ricci_spectrum_exact(obj, z1) -> list[tuple]:
    """(eigenvalue, multiplicity) of Ric(g0) from the closed forms (exact for rational z1)."""
    space = _space(obj, z1)
    g0 = canonical_metric(space.z1)
    ev = ricci_eigenvalues_exact(space, g0)
    d1, d2, _ = space.dims
    out = [(ev["r1"], d1), (ev["r2"], d2)]
    for b, r in zip(space.model.blocks, ev["r3"]):
        out.append((r, b.size))
    return out


def expected_canonical_spectrum(model: AlignedModel) -> list[tuple]:
    d1, d2, _ = model.dims
    out = [(Fraction(1, 4), d1), ((model.c1 - 1) / 4, d2)]
    for b, lam in zip(model.blocks, model.lambdas):
        out.append((model.c1 * (1 - lam) / 4, b.size))
    return out
