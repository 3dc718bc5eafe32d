"""Print the catalog constants, the exact legacy derivatives and the corrigendum tables.

Usage: python3 scripts/reproduce_tables.py [--out DIR]
Writes JSON + markdown per table when --out is given.
"""

import argparse
from fractions import Fraction as F

from brf import report
from brf.catalog import aligned_ids, computed_constants, load_model
from brf.legacy import canonical_point, corrigendum_report, legacy_partials, ratio_derivatives


def constants_table():
    rows = []
    for sid in aligned_ids():
        m = load_model(sid)
        c = computed_constants(m)
        rows.append({"space": sid, **c, "assumption": m.assumption["holds"]})
    return {"command": "constants", "rows": rows}


def legacy_table():
    rows = []
    for sid in ("su3xsu3_so3", "su4xsu4_sp2", "so8xso7_g2", "su7xso8_so7", "so10xsu4_sp2"):
        m = load_model(sid)
        x3, z1 = canonical_point(m)
        fx, fz = legacy_partials(m, x3, z1)
        d = ratio_derivatives(m, z1)
        rows.append({
            "space": sid, "x3": x3, "z1": z1, "F_x3": fx, "F_z1": fz,
            "x3_prime": d["x3_prime"], "r12_prime": d["r12_prime"], "r13_prime": d["r13_prime"],
        })
    return {"command": "legacy", "rows": rows}


def corrigendum_table():
    grid = [F(1, 10), F(1, 2), F(1), F(2), F(10)]
    rows = []
    for sid in ("su3xsu3_so3", "so8xso7_g2"):
        for r in corrigendum_report(load_model(sid), grid):
            rows.append({"space": sid, **r})
    return {"command": "corrigendum", "rows": rows}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", help="directory for JSON/markdown output")
    args = ap.parse_args()
    for name, build in (("constants", constants_table), ("legacy", legacy_table), ("corrigendum", corrigendum_table)):
        payload = build()
        print(report.to_markdown(payload))
        if args.out:
            report.write(payload, f"{args.out}/{name}")


if __name__ == "__main__":
    main()
