"""Ricci tensor, the 3-form H_Q, H^2, dH and the codifferential.

Every quantity has a brute-force version working directly from structure
constants in the adapted basis, and (for Ricci and H^2) a closed form in
terms of the alignment constants and the isotropy Casimirs.

Symmetric 2-tensors are stored as bilinear forms in the g_b-orthonormal
adapted basis of p = p1 + p2 + p3.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .aligned import AlignedSpace, as_number
from .liealg import ParameterError


@dataclass(frozen=True)
class DiagonalMetric:
    """g = x1 g_b|p1 + x2 g_b|p2 + x3 g_b|p3 for the background g_b(z1)."""

    z1: Fraction | float
    x1: Fraction | float
    x2: Fraction | float
    x3: Fraction | float

    def __post_init__(self):
        for name in ("z1", "x1", "x2", "x3"):
            v = getattr(self, name)
            object.__setattr__(self, name, as_number(v))
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")

    @property
    def x(self) -> tuple:
        return (self.x1, self.x2, self.x3)

    def scaled(self, c) -> "DiagonalMetric":
        return DiagonalMetric(self.z1, self.x1 * c, self.x2 * c, self.x3 * c)

    def weights(self, space: AlignedSpace) -> np.ndarray:
        d1, d2, d3 = space.dims
        return np.concatenate(
            [np.full(d1, float(self.x1)), np.full(d2, float(self.x2)), np.full(d3, float(self.x3))]
        )


@dataclass(frozen=True, eq=False)
class SymmetricTwoTensor:
    matrix: np.ndarray
    slices: dict

    def block(self, a: str, b: str | None = None) -> np.ndarray:
        return self.matrix[self.slices[a], self.slices[b or a]]

    def operator(self, weights: np.ndarray) -> np.ndarray:
        """The g-self-adjoint operator, as a symmetric matrix in a g-orthonormal basis."""
        s = 1 / np.sqrt(weights)
        return self.matrix * s[:, None] * s[None, :]

    def __sub__(self, other: "SymmetricTwoTensor") -> "SymmetricTwoTensor":
        return SymmetricTwoTensor(self.matrix - other.matrix, self.slices)

    def scale(self, c: float) -> "SymmetricTwoTensor":
        return SymmetricTwoTensor(self.matrix * c, self.slices)

    def max_abs(self) -> float:
        return float(np.abs(self.matrix).max(initial=0.0))


@dataclass(frozen=True, eq=False)
class InvariantThreeForm:
    coeffs: np.ndarray  # H(E_a, E_b, E_c) on the g_b-orthonormal p-basis

    def antisymmetry_residual(self) -> float:
        h = self.coeffs
        r = max(
            np.abs(h + np.transpose(h, (1, 0, 2))).max(initial=0.0),
            np.abs(h + np.transpose(h, (0, 2, 1))).max(initial=0.0),
        )
        return float(r)

    def scale(self, c: float) -> "InvariantThreeForm":
        return InvariantThreeForm(self.coeffs * c)


def _p_slices(space: AlignedSpace) -> dict:
    s = space.slices
    return {"p1": s["p1"], "p2": s["p2"], "p3": s["p3"]}


def _p_structure(space: AlignedSpace) -> np.ndarray:
    n = space.np
    return space.structure[:n, :n, :n]


# ---------------------------------------------------------------------------
# Ricci


def bracket_table(c: np.ndarray, w: np.ndarray) -> np.ndarray:
    """D[a,b,c] = g([F_a, F_b], F_c) for F_a = E_a / sqrt(w_a), given C[a,b,c] = g_b([E_a,E_b], E_c)."""
    sw = np.sqrt(w)
    return c * sw[None, None, :] / (sw[:, None, None] * sw[None, :, None])


def _bracket_table(space: AlignedSpace, w: np.ndarray) -> np.ndarray:
    return bracket_table(_p_structure(space), w)


def m_quadratic(space: AlignedSpace, metric: DiagonalMetric, v: np.ndarray) -> float:
    """The quadratic form g(M X, X) for X = sum v_a F_a (F g-orthonormal)."""
    d = _bracket_table(space, metric.weights(space))
    adx = np.einsum("a,aij->ij", v, d)
    coad = np.einsum("ijc,c->ij", d, v)
    return float(-0.5 * np.sum(adx**2) + 0.25 * np.sum(coad**2))


def ricci_from_structure(c: np.ndarray, killing: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Ric = M - kil/2 as a bilinear form on the g_b-orthonormal E_a, g = diag(w).

    c holds the p-components of brackets and killing the Killing form of the
    full algebra restricted to p (both in the E basis).
    """
    d = bracket_table(c, w)
    # polarization of m_quadratic, expanded termwise
    m = -0.5 * np.einsum("aij,bij->ab", d, d) + 0.25 * np.einsum("ija,ijb->ab", d, d)
    sw = np.sqrt(w)
    ric_on = m - 0.5 * killing / (sw[:, None] * sw[None, :])
    ric = ric_on * sw[:, None] * sw[None, :]
    return 0.5 * (ric + ric.T)


def ricci_bruteforce(space: AlignedSpace, metric: DiagonalMetric) -> SymmetricTwoTensor:
    n = space.np
    ric = ricci_from_structure(_p_structure(space), space.killing_adapted[:n, :n], metric.weights(space))
    return SymmetricTwoTensor(ric, _p_slices(space))


def _f(v) -> float:
    return float(v)


def ricci_p3_eigenvalue(space: AlignedSpace, metric: DiagonalMetric, lam) -> Fraction | float:
    """r_l on p3^l; exact when the inputs are rational."""
    c = space.const
    c1, c2 = space.c1, space.c2
    x1, x2, x3 = metric.x
    if not all(isinstance(v, Fraction) for v in (x1, x2, x3, c.z1)):
        c1, c2, lam = float(c1), float(c2), float(lam)
        x1, x2, x3 = float(x1), float(x2), float(x3)
        A3, B3, z1, z2 = (float(v) for v in (c.A3, c.B3, c.z1, c.z2))
    else:
        A3, B3, z1, z2 = c.A3, c.B3, c.z1, c.z2
    t1 = (2 * x1**2 - x3**2) / x1**2
    t2 = (2 * x2**2 - x3**2) * A3**2 / x2**2
    lam_part = lam / (4 * x3 * B3) * (t1 + t2 - (1 + A3) / B3 * (z1 / c1 + z2 * A3**3 / c2))
    rest = 1 / (4 * x3 * B3) * (
        2 * (1 / c1 + A3**2 / c2) - (2 * x1**2 - x3**2) / (x1**2 * c1) - (2 * x2**2 - x3**2) * A3**2 / (x2**2 * c2)
    )
    return lam_part + rest


def ricci_operator_p1(space: AlignedSpace, metric: DiagonalMetric, cas: np.ndarray) -> np.ndarray:
    c = space.const
    x1, x3 = _f(metric.x1), _f(metric.x3)
    z1, b3, c1 = _f(c.z1), _f(c.B3), _f(space.c1)
    n = cas.shape[0]
    return np.eye(n) / (4 * x1 * z1) + (1 / (2 * x1)) * (1 / z1 - x3 / (x1 * c1 * b3)) * cas


def ricci_operator_p2(space: AlignedSpace, metric: DiagonalMetric, cas: np.ndarray) -> np.ndarray:
    c = space.const
    x2, x3 = _f(metric.x2), _f(metric.x3)
    z2, b3, c2, a3 = _f(c.z2), _f(c.B3), _f(space.c2), _f(c.A3)
    n = cas.shape[0]
    return np.eye(n) / (4 * x2 * z2) + (1 / (2 * x2)) * (1 / z2 - x3 * a3**2 / (x2 * c2 * b3)) * cas


def ricci_closed(space: AlignedSpace, metric: DiagonalMetric) -> SymmetricTwoTensor:
    cas1, cas2 = space.casimir_blocks()
    n = space.np
    s = space.slices
    out = np.zeros((n, n))
    out[s["p1"], s["p1"]] = _f(metric.x1) * ricci_operator_p1(space, metric, cas1)
    out[s["p2"], s["p2"]] = _f(metric.x2) * ricci_operator_p2(space, metric, cas2)
    for sl, lam in space.p3_blocks:
        r = _f(ricci_p3_eigenvalue(space, metric, lam))
        idx = np.arange(sl.start, sl.stop)
        out[idx, idx] = _f(metric.x3) * r
    return SymmetricTwoTensor(out, _p_slices(space))


def ricci_eigenvalues_exact(space: AlignedSpace, metric: DiagonalMetric) -> dict:
    """Closed-form Ricci eigenvalues (w.r.t. g), exact on rational input.

    A non-scalar Casimir is allowed only where its coefficient vanishes
    exactly (as it does at the canonical metric).
    """
    m = space.model
    c = space.const
    x1, x2, x3 = metric.x
    coef1 = (1 / (2 * x1)) * (1 / c.z1 - x3 / (x1 * space.c1 * c.B3))
    coef2 = (1 / (2 * x2)) * (1 / c.z2 - x3 * c.A3**2 / (x2 * space.c2 * c.B3))
    out = {}
    for key, base, coef, kap in (
        ("r1", 1 / (4 * x1 * c.z1), coef1, m.kappa1),
        ("r2", 1 / (4 * x2 * c.z2), coef2, m.kappa2),
    ):
        if coef == 0:
            out[key] = base
        elif kap is None:
            raise ParameterError("exact eigenvalues need scalar Casimirs away from the canonical metric")
        else:
            out[key] = base + coef * kap
    out["r3"] = [ricci_p3_eigenvalue(space, metric, lam) for lam in m.lambdas]
    return out


# ---------------------------------------------------------------------------
# the 3-form H_Q and H^2


def hq_form(space: AlignedSpace) -> InvariantThreeForm:
    """H_Q(X,Y,Z) = Q([X,Y],Z) + Q([X,Y]_k,Z) - Q([X,Z]_k,Y) + Q([Y,Z]_k,X) on p."""
    n = space.np
    cst = space.structure
    q = space.q_adapted
    ks = space.slices["k"]
    cp = cst[:n, :n, :]
    qp = q[:, :n]
    full = np.einsum("abm,mc->abc", cp, qp)
    ck = cp[:, :, ks]
    qk = q[ks, :n]
    proj = np.einsum("abm,mc->abc", ck, qk)  # Q([X,Y]_k, Z)
    h = full + proj - np.transpose(proj, (0, 2, 1)) + np.transpose(proj, (2, 0, 1))
    return InvariantThreeForm(h)


def h_squared_from_coeffs(h: np.ndarray, w: np.ndarray) -> np.ndarray:
    """H^2(E_a,E_b) = sum_{i,j} H(E_a,E_i,E_j) H(E_b,E_i,E_j) / (w_i w_j)."""
    inv = 1 / w
    t = h * inv[None, :, None] * inv[None, None, :]
    h2 = np.einsum("aij,bij->ab", t, h)
    return 0.5 * (h2 + h2.T)


def h_squared_bruteforce(space: AlignedSpace, metric: DiagonalMetric, h: InvariantThreeForm) -> SymmetricTwoTensor:
    """H^2(X,Y) = sum_{i,j} H(X,F_i,F_j) H(Y,F_i,F_j) over a g-orthonormal basis."""
    return SymmetricTwoTensor(h_squared_from_coeffs(h.coeffs, metric.weights(space)), _p_slices(space))


def h_squared_p3_value(space: AlignedSpace, metric: DiagonalMetric, lam, mode: str):
    """H^2(e, e) for a g_b-unit e in p3^l; legacy mode keeps the extra 1/sqrt(B4)."""
    c = space.const
    c1, c2 = _f(space.c1), _f(space.c2)
    x1, x2, x3 = (_f(v) for v in metric.x)
    y1, y2, z1, z2 = _f(c.y1), _f(c.y2), _f(c.z1), _f(c.z2)
    a3, b3, c3, b4 = _f(c.A3), _f(c.B3), _f(c.C3), _f(c.B4)
    lam = _f(lam)
    s_term = (1 / (x1**2 * b3)) * (y1 / z1 + c3 / b4) ** 2 * (1 - c1 * lam) / c1
    s_term += (1 / (x2**2 * b3)) * (y2 * a3 / z2 + c3 / b4) ** 2 * (1 - c2 * lam) / c2
    coef = 3 * c3 / b4 if mode == "corrected" else 3 * c3 / (b4 * np.sqrt(b4))
    inner = y1 / c1 + a3**3 * y2 / c2 + coef * (z1 / c1 + a3**2 * z2 / c2)
    return s_term + lam / (x3**2 * b3**3) * inner**2


def h_squared_p_blocks(space: AlignedSpace, metric: DiagonalMetric, k: int, cas: np.ndarray) -> np.ndarray:
    """H^2 on g_b-unit vectors of p_k: (2S_k/(x_k c_k) - 2 y_k^2/(x_k^2 z_k^3)) cas + y_k^2/(x_k^2 z_k^3) I."""
    c = space.const
    x3 = _f(metric.x3)
    b3, c3, b4, a3 = _f(c.B3), _f(c.C3), _f(c.B4), _f(c.A3)
    if k == 1:
        xk, ck, yk, zk = _f(metric.x1), _f(space.c1), _f(c.y1), _f(c.z1)
        s = (yk / zk + c3 / b4) ** 2 / (x3 * b3)
    else:
        xk, ck, yk, zk = _f(metric.x2), _f(space.c2), _f(c.y2), _f(c.z2)
        s = (a3 * yk / zk + c3 / b4) ** 2 / (x3 * b3)
    base = yk**2 / (xk**2 * zk**3)
    return (2 * s / (xk * ck) - 2 * base) * cas + base * np.eye(cas.shape[0])


def h_squared_closed(space: AlignedSpace, metric: DiagonalMetric, mode: str = "corrected") -> SymmetricTwoTensor:
    if mode not in ("corrected", "legacy"):
        raise ParameterError(f"unknown mode {mode!r}")
    cas1, cas2 = space.casimir_blocks()
    n = space.np
    s = space.slices
    out = np.zeros((n, n))
    out[s["p1"], s["p1"]] = h_squared_p_blocks(space, metric, 1, cas1)
    out[s["p2"], s["p2"]] = h_squared_p_blocks(space, metric, 2, cas2)
    for sl, lam in space.p3_blocks:
        idx = np.arange(sl.start, sl.stop)
        out[idx, idx] = h_squared_p3_value(space, metric, lam, mode)
    return SymmetricTwoTensor(out, _p_slices(space))


def h_squared_p3_exact(space: AlignedSpace, metric: DiagonalMetric, lam) -> Fraction:
    """Corrected H^2(e, e) for a g_b-unit e in p3^l, exact for rational inputs."""
    c = space.const
    c1, c2 = space.c1, space.c2
    x1, x2, x3 = metric.x
    s_term = (1 / (x1**2 * c.B3)) * (c.y1 / c.z1 + c.C3 / c.B4) ** 2 * (1 - c1 * lam) / c1
    s_term += (1 / (x2**2 * c.B3)) * (c.y2 * c.A3 / c.z2 + c.C3 / c.B4) ** 2 * (1 - c2 * lam) / c2
    inner = c.y1 / c1 + c.A3**3 * c.y2 / c2 + 3 * c.C3 / c.B4 * (c.z1 / c1 + c.A3**2 * c.z2 / c2)
    return s_term + lam / (x3**2 * c.B3**3) * inner**2


# ---------------------------------------------------------------------------
# exterior derivative and codifferential


def exterior_derivative_from_structure(c: np.ndarray, h: np.ndarray) -> np.ndarray:
    """dH(X0,..,X3) = sum_{i<j} (-1)^{i+j} H([X_i,X_j]_p, ...) for invariant H."""
    t = np.tensordot(c, h, axes=([2], [0]))  # t[a,b,c,d] = H([E_a,E_b]_p, E_c, E_d)
    # pairs (i,j) and the order of the remaining slots
    terms = [
        ((0, 1), (2, 3), -1),
        ((0, 2), (1, 3), 1),
        ((0, 3), (1, 2), -1),
        ((1, 2), (0, 3), -1),
        ((1, 3), (0, 2), 1),
        ((2, 3), (0, 1), -1),
    ]
    out = np.zeros_like(t)
    for (i, j), (k, l), sign in terms:
        # t indices (a,b,c,d) correspond to slots (i,j,k,l)
        perm = np.argsort([i, j, k, l])
        out += sign * np.transpose(t, perm)
    return out


def exterior_derivative(space: AlignedSpace, h: InvariantThreeForm) -> np.ndarray:
    return exterior_derivative_from_structure(_p_structure(space), h.coeffs)


def nomizu_from_structure(c: np.ndarray, w: np.ndarray) -> np.ndarray:
    """L[a,b,c] = g(Lambda(F_a) F_b, F_c) for the Levi-Civita connection."""
    d = bracket_table(c, w)
    return 0.5 * d + 0.5 * (np.transpose(d, (1, 2, 0)) + np.transpose(d, (2, 1, 0)))


def _nomizu(space: AlignedSpace, w: np.ndarray) -> np.ndarray:
    return nomizu_from_structure(_p_structure(space), w)


def covariant_from_structure(c: np.ndarray, h: np.ndarray, w: np.ndarray) -> np.ndarray:
    """(nabla_{F_a} H)(F_b,F_c,F_d) in a g-orthonormal basis."""
    sw = np.sqrt(w)
    hg = h / (sw[:, None, None] * sw[None, :, None] * sw[None, None, :])
    lam = nomizu_from_structure(c, w)
    t1 = np.einsum("abm,mcd->abcd", lam, hg)
    t2 = np.einsum("acm,bmd->abcd", lam, hg)
    t3 = np.einsum("adm,bcm->abcd", lam, hg)
    return -(t1 + t2 + t3)


def codifferential_from_structure(c: np.ndarray, h: np.ndarray, w: np.ndarray) -> np.ndarray:
    """delta H(Y,Z) = -sum_i (nabla_{F_i} H)(F_i, Y, Z), in a g-orthonormal basis."""
    return -np.einsum("iiyz->yz", covariant_from_structure(c, h, w))


def covariant_derivative(space: AlignedSpace, metric: DiagonalMetric, h: InvariantThreeForm) -> np.ndarray:
    return covariant_from_structure(_p_structure(space), h.coeffs, metric.weights(space))


def codifferential(space: AlignedSpace, metric: DiagonalMetric, h: InvariantThreeForm) -> np.ndarray:
    return codifferential_from_structure(_p_structure(space), h.coeffs, metric.weights(space))


def levi_civita_checks(space: AlignedSpace, metric: DiagonalMetric) -> dict:
    """Metric compatibility (skew Lambda) and zero torsion of the Nomizu map."""
    w = metric.weights(space)
    lam = _nomizu(space, w)
    d = _bracket_table(space, w)
    skew = np.abs(lam + np.transpose(lam, (0, 2, 1))).max(initial=0.0)
    torsion = np.abs(lam - np.transpose(lam, (1, 0, 2)) - d).max(initial=0.0)
    return {"skew": float(skew), "torsion": float(torsion)}
