"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (printed in the terminal summary) before
asserting, so a failing criterion still reports what was measured.
"""

import time
from fractions import Fraction as F

import numpy as np
from scipy.integrate import solve_ivp

from brf.aligned import UnsupportedSpace
from brf.catalog import aligned_ids, catalog, check_entry, load_algebra, load_model
from brf.config import MultistartConfig
from brf.curvature import (
    DiagonalMetric,
    h_squared_bruteforce,
    h_squared_closed,
    hq_form,
    ricci_bruteforce,
    ricci_closed,
)
from brf.flow import FlowState, canonical_state, flow_rhs, rk4_fixed
from brf.group import group_metric, identity_defect, su2, su2_su2, verify_rigidity
from brf.legacy import implicit_derivative, legacy_partials, ratio_derivatives
from brf.solver import (
    canonical_solution,
    expected_canonical_spectrum,
    positivity_certificate,
    ricci_spectrum,
    ricci_spectrum_exact,
    solve_corrected,
)
from conftest import z1_grid

SEED = 20240611
ORACLE_TOL = 1e-9
BIG_DIM = 49  # spaces with dim g >= 49 use the reduced sample of 10 metrics


def _random_metrics(model, rng):
    """100 random diagonal metrics (10 values of z1, 10 triples each), or 10 for large spaces."""
    total = model.embedding.total_dim
    n_z, n_x = (10, 1) if total >= BIG_DIM else (10, 10)
    for z1 in np.exp(rng.uniform(np.log(0.1), np.log(10.0), n_z)):
        space = model.at(float(z1))
        for x in np.exp(rng.uniform(np.log(0.2), np.log(5.0), (n_x, 3))):
            yield space, DiagonalMetric(float(z1), *x)


def test_criterion_01_ricci_oracle(acceptance_log):
    rng = np.random.default_rng(SEED)
    worst, count, t0 = 0.0, 0, time.perf_counter()
    small_time = 0.0
    for sid in aligned_ids():
        model = load_model(sid)
        ts = time.perf_counter()
        for space, metric in _random_metrics(model, rng):
            diff = ricci_closed(space, metric).matrix - ricci_bruteforce(space, metric).matrix
            worst = max(worst, float(np.abs(diff).max()))
            count += 1
        if model.embedding.total_dim < BIG_DIM:
            small_time += time.perf_counter() - ts
    total = time.perf_counter() - t0
    ok = worst < ORACLE_TOL and small_time < 60 and total < 300
    acceptance_log(1, ok, f"max |ric_closed - ric_oracle| = {worst:.2e} over {count} metrics, "
                   f"{small_time:.1f} s (dim g < 49), {total:.1f} s total")
    assert ok


def test_criterion_02_h2_oracle(acceptance_log, su3_model):
    rng = np.random.default_rng(SEED + 1)
    worst, count = 0.0, 0
    for sid in aligned_ids():
        model = load_model(sid)
        h = None
        for space, metric in _random_metrics(model, rng):
            h = hq_form(space)
            diff = h_squared_closed(space, metric, "corrected").matrix - h_squared_bruteforce(space, metric, h).matrix
            worst = max(worst, float(np.abs(diff).max()))
            count += 1
    corrected_ok = worst < ORACLE_TOL

    # legacy p3 block on SU(3)xSU(3)/SO(3) at z1 = 1
    space = su3_model.at(1.0)
    p3 = space.slices["p3"]
    metrics = [DiagonalMetric(1.0, *x) for x in np.exp(rng.uniform(np.log(0.2), np.log(5.0), (20, 3)))]
    metrics.append(DiagonalMetric(1.0, 1.0, 1.0, 2.0))
    legacy_dev = 0.0
    for metric in metrics:
        leg = h_squared_closed(space, metric, "legacy").matrix[p3, p3]
        ref = h_squared_bruteforce(space, metric, hq_form(space)).matrix[p3, p3]
        legacy_dev = max(legacy_dev, float(np.abs(leg - ref).max()))
    legacy_ok = legacy_dev > 1e-3
    ok = corrected_ok and legacy_ok
    acceptance_log(
        2, ok,
        f"corrected: max dev {worst:.2e} over {count} metrics ({'ok' if corrected_ok else 'bad'}); "
        f"legacy p3 at z1=1 on su3xsu3_so3: max dev {legacy_dev:.2e}, required > 1e-3 "
        f"({'ok' if legacy_ok else 'not met: legacy and corrected p3 coincide at z1 = c1 - 1 = 1'})",
    )
    assert ok


def test_criterion_03_existence(acceptance_log):
    worst, where = 0.0, None
    for sid in aligned_ids():
        model = load_model(sid)
        for z1 in z1_grid(model.c1):
            r = canonical_solution(model, z1).residual
            if r >= worst:
                worst, where = r, (sid, str(z1))
    ok = worst < 1e-10
    acceptance_log(3, ok, f"max BRF residual (Ricci, dH, delta H) at g0 = {worst:.2e} ({where[0]}, z1={where[1]})")
    assert ok


def test_criterion_04_single_metric(acceptance_log):
    bad = []
    spread = 0.0
    for sid in aligned_ids():
        model = load_model(sid)
        exact_set, num = set(), []
        for z1 in z1_grid(model.c1):
            sol = canonical_solution(model, z1)
            exact_set.add(tuple(sol.gk_coordinates))
            num.append(sol.gk_numeric)
        num = np.array(num)
        spread = max(spread, float(np.abs(num - num[0]).max()))
        if len(exact_set) != 1:
            bad.append(f"{sid}: exact triples differ")
        if model.c1 == 2 and exact_set != {(F(1), F(1), F(2))}:
            bad.append(f"{sid}: not (1, 1, 2)")
    ok = not bad and spread < 1e-10
    acceptance_log(4, ok, f"exact g_K triple constant on every space, numeric spread {spread:.2e}; "
                   f"c1 = 2 spaces give (1, 1, 2) exactly" + (f"; problems: {bad}" if bad else ""))
    assert ok


def test_criterion_05_spectrum(acceptance_log):
    bad, worst = [], 0.0
    for sid in aligned_ids():
        model = load_model(sid)
        want = expected_canonical_spectrum(model)
        flat = np.sort(np.concatenate([np.full(m, float(v)) for v, m in want]))
        for z1 in z1_grid(model.c1):
            if ricci_spectrum_exact(model, z1) != want:
                bad.append(f"{sid} z1={z1}")
        for z1 in (F(1, 2), F(2)):
            space = model.at(float(z1))
            sol = canonical_solution(model, z1)
            g0 = DiagonalMetric(float(z1), *(float(v) for v in sol.metric.x))
            worst = max(worst, float(np.abs(ricci_spectrum(space, g0) - flat).max()))
    ok = not bad and worst < 1e-10
    acceptance_log(5, ok, f"exact spectra match on all spaces and grid z1; brute-force eigenvalue deviation {worst:.2e}"
                   + (f"; mismatches: {bad}" if bad else ""))
    assert ok


def test_criterion_06_legacy_numbers(acceptance_log):
    t0 = time.perf_counter()
    checks = {}
    su3 = load_model("su3xsu3_so3")
    lam = su3.lambdas[0]
    fx, fz = legacy_partials(su3, F(2), F(1))
    checks["su3 dF/dx3 = 16(1-lam) = 44/3"] = fx == 16 * (1 - lam) == F(44, 3)
    checks["su3 dF/dz1 = 16-10lam = 91/6"] = fz == 16 - 10 * lam == F(91, 6)
    xp = implicit_derivative(su3, F(1))
    checks["su3 x3'(1) = -91/88"] = xp == -(8 - 5 * lam) / (8 * (1 - lam)) == F(-91, 88)
    rd = ratio_derivatives(su3, F(1))
    checks["su3 r13'(1) = 45/2662"] = rd["r13_prime"] == F(45, 2662)

    so8 = load_model("so8xso7_g2")
    fx, fz = legacy_partials(so8, F(11, 5), F(5, 6))
    checks["so8 dF/dx3 = 847/90"] = fx == F(847, 90)
    checks["so8 dF/dz1 = 1994/125"] = fz == F(1994, 125)
    checks["so8 x3'(5/6) = -35892/21175"] = implicit_derivative(so8, F(5, 6)) == F(-35892, 21175)
    checks["so8 r12'(5/6) = -864/46585"] = ratio_derivatives(so8, F(5, 6))["r12_prime"] == F(-864, 46585)
    elapsed = time.perf_counter() - t0
    ok = all(checks.values()) and elapsed < 10
    failed = [k for k, v in checks.items() if not v]
    acceptance_log(6, ok, f"{sum(checks.values())}/{len(checks)} exact rationals reproduced in {elapsed:.1f} s"
                   + (f"; failed: {failed}" if failed else ""))
    assert ok


def test_criterion_07_uniqueness(acceptance_log):
    cert_bad = []
    for sid in aligned_ids():
        model = load_model(sid)
        for z1 in z1_grid(model.c1):
            if not positivity_certificate(model, z1)["holds"]:
                cert_bad.append(f"{sid} z1={z1}")
    others, runs, conv = [], 0, 0
    for sid in ("su2xsu3_s1_21", "su3xsu3_so3"):
        model = load_model(sid)
        for z1 in z1_grid(model.c1):
            _, info = solve_corrected(model, z1, MultistartConfig(starts=50, seed=SEED))
            runs += 1
            conv += info["search"]["converged"]
            others += [(sid, str(z1), s) for s in info["search"]["other_solutions"]]
    ok = not cert_bad and not others
    acceptance_log(7, ok, f"positivity certificate holds on all spaces and grid z1"
                   f"{'' if not cert_bad else ' except ' + str(cert_bad)}; "
                   f"{runs} x 50-start Newton runs, {conv} converged starts, {len(others)} non-canonical solutions")
    assert ok


def test_criterion_08_group_rigidity(acceptance_log):
    rigid = {}
    for name, alg in (("su2", su2()), ("su2+su2", su2_su2())):
        rep = verify_rigidity(alg, trials=100, seed=SEED)
        sols = [np.array(s) for s in rep["solutions"]]
        rigid[name] = rep["solutions_found"] == 1 and np.allclose(sols[0], 1.0, atol=1e-8) and rep["status"] == "ok"
    rng = np.random.default_rng(SEED)
    plus, minus = 0.0, 0.0
    for alg in (su2(), su2_su2(), load_algebra("su2+su2")):
        for _ in range(50):
            x = np.exp(rng.uniform(np.log(0.2), np.log(5.0), alg.dim))
            m = group_metric(alg, x)
            plus = max(plus, identity_defect(m, +1.0))
            minus = max(minus, identity_defect(m, -1.0))
    identity_ok = plus < 1e-10
    ok = all(rigid.values()) and identity_ok
    acceptance_log(
        8, ok,
        f"100-start search: su2 only ones = {rigid['su2']}, su2+su2 only ones = {rigid['su2+su2']}; "
        f"identity ric - H_b^2/4 = +(1/4) BRF1: max defect {plus:.2e} (required < 1e-10); "
        f"with -(1/4) BRF1 the defect is {minus:.2e}",
    )
    assert ok


def test_criterion_09_flow(acceptance_log):
    worst, supported = 0.0, []
    for sid in aligned_ids():
        model = load_model(sid)
        for z1 in z1_grid(model.c1):
            space = model.at(float(z1))
            try:
                rhs = flow_rhs(space, canonical_state(space))
            except UnsupportedSpace:
                break
            worst = max(worst, float(np.abs(rhs).max()))
        else:
            supported.append(sid)

    space = load_model("su3xsu3_so3").at(1.0)

    def f(t, y):
        return flow_rhs(space, FlowState(t, tuple(y)))

    x0 = np.array(canonical_state(space).x) * np.array([1.3, 0.8, 1.2])
    ref = solve_ivp(f, (0.0, 1.0), x0, method="DOP853", rtol=1e-13, atol=1e-14).y[:, -1]
    errs = [float(np.abs(rk4_fixed(f, x0, 1.0, n) - ref).max()) for n in (8, 16, 32, 64)]
    ratios = [errs[i] / errs[i + 1] for i in range(3)]
    order_ok = all(14 <= r <= 18 for r in ratios)
    ok = worst < 1e-12 and order_ok
    acceptance_log(9, ok, f"max |flow_rhs(g0)| = {worst:.2e} on {len(supported)} supported spaces; "
                   f"RK4 error ratios {', '.join(f'{r:.2f}' for r in ratios)}")
    assert ok


def test_criterion_10_structure(acceptance_log):
    jac, cert_bad, cat_bad = 0.0, [], []
    for e in catalog():
        if e.kind == "group":
            jac = max(jac, load_algebra(e.id).jacobi_residual())
            continue
        model = load_model(e.id)
        emb = model.embedding
        for alg in (emb.g1, emb.g2, emb.k):
            jac = max(jac, alg.jacobi_residual())
        if not all(model.alignment.certificate().values()):
            cert_bad.append(e.id)
    for e in catalog():
        if not check_entry(e, exact_mode=True)["ok"]:
            cat_bad.append(e.id)
    pinned = {"su3xsu3_so3": F(2), "so8xso7_g2": F(11, 6), "so10xsu4_sp2": F(7, 6), "su7xso8_so7": F(10, 7)}
    pin_ok = all(load_model(k).c1 == v for k, v in pinned.items())
    ok = jac < 1e-12 and not cert_bad and not cat_bad and pin_ok
    acceptance_log(10, ok, f"max Jacobi residual {jac:.2e}; alignment certificates exact "
                   f"{'on all spaces' if not cert_bad else 'failed on ' + str(cert_bad)}; catalog "
                   f"{'matches' if not cat_bad else 'mismatch on ' + str(cat_bad)}; c1 in {{2, 11/6, 7/6, 10/7}} exact = {pin_ok}")
    assert ok
