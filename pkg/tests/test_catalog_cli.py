import json
import shutil
import subprocess
from fractions import Fraction as F

import pytest

from brf import report
from brf.catalog import (
    MalformedSpec,
    UnknownSpace,
    catalog,
    check_entry,
    embedding_from_spec,
    entry,
    load_model,
)
from brf.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def rat(d):
    return F(d["num"], d["den"])


# -- catalog ------------------------------------------------------------------


@pytest.mark.parametrize("e", catalog(), ids=lambda e: e.id)
def test_catalog_entry_matches(e):
    res = check_entry(e, exact_mode=True)
    assert res["ok"], res["mismatches"]


def test_catalog_float_mode():
    assert all(check_entry(e, exact_mode=False)["ok"] for e in catalog())


def test_catalog_contents():
    ids = {e.id for e in catalog()}
    for need in ("su2xsu3_s1_21", "su3xsu3_so3", "su4xsu4_sp2", "so8xso7_g2", "so10xsu4_sp2",
                 "su7xso8_so7", "su2", "su2+su2"):
        assert need in ids
    assert load_model("so10xsu4_sp2").c1 == F(7, 6)
    assert load_model("su7xso8_so7").c1 == F(10, 7)
    assert load_model("su2xsu2_s1_11").c1 == 2
    assert load_model("g2xsp2_su2").c1 == F(71, 56)


def test_parametric_circle_entry():
    assert load_model("su2xsu2_s1_3_1").c1 == F(10, 9)
    with pytest.raises(UnknownSpace):
        entry("no_such_space")


def test_spec_constructor():
    emb, z1 = embedding_from_spec({"subgroup": {"constructor": "circle_su2_su2", "params": {"p": 2, "q": 1}},
                                   "z1": "1/2"})
    assert z1 == F(1, 2)
    assert emb.k.dim == 1


@pytest.mark.parametrize("spec", [
    [],
    {"subgroup": {"constructor": "nope"}},
    {"subgroup": {"constructor": "circle_su2_su2", "params": {"r": 1}}},
    {"factor1": {"family": "su", "n": 2}, "factor2": {"family": "su", "n": 2}, "subgroup": {"basis": [[1, 0]]}},
    {"factor1": {"family": "xx", "n": 2}, "factor2": {"family": "su", "n": 2}, "subgroup": {"basis": [[1]]}},
])
def test_malformed_specs(spec):
    with pytest.raises(MalformedSpec):
        embedding_from_spec(spec)


def test_explicit_basis_spec(tmp_path, capsys):
    # the diagonal circle (h, h) in su(2) + su(2), written out by hand
    from brf.liealg import build_classical

    h = build_classical("su", 2).labels.index("h1")
    vec = [0] * 6
    vec[h] = vec[3 + h] = 1
    spec = {"factor1": {"family": "su", "n": 2}, "factor2": {"family": "su", "n": 2},
            "subgroup": {"basis": [vec], "blocks": [[0, 1, True]]}, "z1": "2"}
    path = tmp_path / "circle.json"
    path.write_text(json.dumps(spec))
    code, out = run(capsys, "analyze", "--spec", str(path), "--exact")
    assert code == 0
    assert rat(out["c1"]) == 2


# -- reports ------------------------------------------------------------------


def test_rational_serialization():
    js = json.loads(report.dumps({"v": F(-91, 88), "f": 0.1}))
    assert js["v"]["num"] == -91 and js["v"]["den"] == 88
    assert js["f"] == 0.1


def test_markdown_table():
    md = report.to_markdown({"command": "x", "rows": [{"a": F(1, 2), "b": 1.0}]})
    assert "| a | b |" in md and "| 1/2 |" in md


# -- commands -----------------------------------------------------------------


def test_solve_example(capsys):
    code, out = run(capsys, "solve", "--space", "su3xsu3_so3", "--z1-grid", "0.5,1,2", "--exact")
    assert code == 0
    triples = [[rat(v) for v in s["gk_coordinates"]] for s in out["solutions"]]
    assert triples == [[1, 1, 2]] * 3


def test_legacy_example(capsys):
    code, out = run(capsys, "legacy", "--space", "so8xso7_g2", "--at", "5/6", "--exact")
    assert code == 0
    text = json.dumps(out)
    for num, den in ((847, 90), (1994, 125), (-35892, 21175), (-864, 46585)):
        assert f'"num": {num}' in text and f'"den": {den}' in text
    # the published r13' fraction and its decimal disagree in sign; the computed value follows the decimal
    checks = {r["quantity"]: r for r in out["published_check"]}
    assert out["published_inconsistent"] == ["r13_prime"]
    assert rat(checks["r13_prime"]["computed"]) == F(2160, 41503)
    assert checks["r13_prime"]["decimal_matches"] and not checks["r13_prime"]["fraction_matches"]
    assert all(r["fraction_matches"] for q, r in checks.items() if q != "r13_prime")


def test_group_example(capsys):
    code, out = run(capsys, "group", "--algebra", "su2", "--trials", "100")
    assert code == 0
    assert out["solutions_found"] == 1


def test_verify_exit_codes(capsys):
    code, out = run(capsys, "verify", "--space", "su3xsu3_so3", "--z1", "1", "--x", "1,1,2")
    assert code == 0 and out["brf"]
    code, out = run(capsys, "verify", "--space", "su3xsu3_so3", "--z1", "1", "--x", "1,1,1")
    assert code == 4 and not out["brf"]


def test_input_errors(capsys, tmp_path):
    assert run(capsys, "analyze", "--space", "nonexistent")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    code, out = run(capsys, "analyze", "--spec", str(bad))
    assert code == 2 and out["error"] == "MalformedSpec"
    assert run(capsys, "flow", "--space", "su3xsu3_u2")[0] == 2
    assert run(capsys, "legacy", "--space", "su2xsu3_s1_21")[0] == 2


def test_numerical_failure_exit(capsys):
    code, out = run(capsys, "legacy", "--space", "su3xsu3_so3", "--at", "1000000")
    assert code == 3 and out["error"] == "NumericalFailure"


def test_flow_command(capsys, tmp_path):
    csv_path = tmp_path / "t.csv"
    code, out = run(capsys, "flow", "--space", "su3xsu3_so3", "--z1", "1", "--x0", "1.1,1,2",
                    "--t-end", "0.5", "--csv", str(csv_path))
    assert code == 0
    assert csv_path.read_text().startswith("t,x1,x2,x3,residual")


def test_corrigendum_and_catalog_commands(capsys):
    code, out = run(capsys, "corrigendum", "--space", "su3xsu3_so3", "--z1-grid", "1/2,1,2", "--exact")
    assert code == 0
    assert run(capsys, "catalog-test")[0] == 0


def test_outputs_are_deterministic(tmp_path, capsys):
    args = ["solve", "--space", "su2xsu2_s1_21", "--z1-grid", "1/3,2", "--starts", "10", "--seed", "7"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b")])
    capsys.readouterr()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a.md").read_bytes() == (tmp_path / "b.md").read_bytes()


@pytest.mark.skipif(shutil.which("brf") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["brf", "analyze", "--space", "su3xsu3_so3", "--exact"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "analyze"
