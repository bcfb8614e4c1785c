import csv
import io
import json
import math
from pathlib import Path

import pytest

from heavytail import cli

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def base(**kw):
    obj = {
        "schema_version": 1,
        "experiment_id": "t",
        "functional": "random_max",
        "seq": {"rule": "iid", "law": {"kind": "exponential", "rate": 1.0}},
        "eta": {"kind": "finite", "pmf": {"1": 1.0}},
        "x": [1.0],
    }
    obj.update(kw)
    return obj


def read_csv(path):
    return list(csv.DictReader(io.StringIO(Path(path).read_text())))


def test_bundled_configs_match_examples():
    for key in ("1", "2"):
        want = dict(cli.EXAMPLES[key])
        want.pop("theorem")
        got = json.loads((CONFIGS / f"example{key}.json").read_text())
        assert got == cli.jsonable(want)


@pytest.mark.parametrize("cfg,theorem", [("example1.json", "4"), ("example2.json", "5")])
def test_check_examples_pass(cfg, theorem, tmp_path):
    assert cli.main(["check", "--theorem", theorem, "--config", str(CONFIGS / cfg), "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "check.json").read_text())
    assert report["verdict"] == "pass"


def test_check_failing_hypothesis_exits_3(tmp_path):
    code = cli.main(["check", "--theorem", "5", "--config", str(CONFIGS / "exponential-iid.json"), "--out", str(tmp_path)])
    assert code == 3
    report = json.loads((tmp_path / "check.json").read_text())
    assert report["verdict"] == "fail"


def test_check_pivot_outside_support_exits_3(tmp_path):
    obj = json.loads((CONFIGS / "example1.json").read_text())
    obj["eta"] = {"kind": "finite", "pmf": {"2": 1.0}}
    code = cli.main(["check", "--theorem", "4", "--config", write(tmp_path, obj), "--out", str(tmp_path)])
    assert code == 3
    assert json.loads((tmp_path / "check.json").read_text())["error"]["code"] == "PIVOT_NOT_IN_SUPPORT"


def test_check_inconclusive_exits_4(tmp_path):
    # heavier non-pivot terms make the ratio sum grow slowly over the grid
    seq = {
        "rule": "periodic",
        "pattern": [{"kind": "pareto_shifted", "alpha": 2.5}],
        "head": {"1": {"kind": "pareto_shifted", "alpha": 3.0}},
        "pivot": 1,
    }
    obj = base(seq=seq, eta={"kind": "geometric", "q": 0.5})
    assert cli.main(["check", "--theorem", "4", "--config", write(tmp_path, obj), "--out", str(tmp_path)]) == 4


def test_tail_nonconvergence_exits_2(tmp_path, capsys):
    obj = base(
        seq={"rule": "iid", "law": {"kind": "pareto_shifted", "alpha": 1.0}},
        eta={"kind": "zeta", "s": 1.1},
        x=[10.0],
        tail={"tol": 1e-9},
    )
    assert cli.main(["tail", "--config", write(tmp_path, obj), "--out", str(tmp_path)]) == 2
    rows = read_csv(tmp_path / "t_tail.csv")
    assert rows[0]["method"] == "no_convergence"
    assert float(rows[0]["lower"]) <= float(rows[0]["upper"])


def test_tail_single_term_maximum(tmp_path):
    assert cli.main(["tail", "--config", write(tmp_path, base()), "--out", str(tmp_path)]) == 0
    (row,) = read_csv(tmp_path / "t_tail.csv")
    assert list(row) == list(cli.CSV_HEADER)
    assert float(row["estimate"]) == pytest.approx(math.exp(-1.0), rel=1e-12)
    assert row["seed"] == ""


def test_tail_with_monte_carlo_rows(tmp_path):
    obj = base(eta={"kind": "geometric", "q": 0.5}, x=[1.0, 2.0], mc={"samples": 20000, "seed": 3})
    assert cli.main(["tail", "--config", write(tmp_path, obj), "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "t_tail.csv")
    assert [r["method"] for r in rows].count("monte_carlo") == 2
    assert {r["seed"] for r in rows if r["method"] == "monte_carlo"} == {"3"}


def test_mc_command_and_seed_override(tmp_path):
    obj = base(eta={"kind": "geometric", "q": 0.5}, mc={"samples": 5000, "seed": 1})
    path = write(tmp_path, obj)
    assert cli.main(["mc", "--config", path, "--seed", "9", "--out", str(tmp_path)]) == 0
    (row,) = read_csv(tmp_path / "t_mc.csv")
    assert row["seed"] == "9" and row["method"] == "monte_carlo"


def test_diagnose_writes_reports(tmp_path):
    assert cli.main(["diagnose", "--config", str(CONFIGS / "example1.json"), "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "diagnosis.json").read_text())
    codes = [e.get("error", {}).get("code") for e in data["laws"]]
    assert "ZERO_TAIL" in codes  # the degenerate components
    assert any("report" in e for e in data["laws"])
    assert read_csv(tmp_path / "diagnosis.csv")


def test_bad_configs_exit_1(tmp_path, capsys):
    bad = base(seq={"rule": "iid", "law": {"kind": "gamma"}})
    assert cli.main(["tail", "--config", write(tmp_path, bad)]) == 1
    assert "seq.law.kind" in capsys.readouterr().err
    p = tmp_path / "broken.json"
    p.write_text('{"schema_version": 1,\n  "x": [1, }')
    assert cli.main(["tail", "--config", str(p)]) == 1
    assert "line 2" in capsys.readouterr().err
    assert cli.main(["check", "--theorem", "9", "--config", write(tmp_path, base())]) == 1
    assert cli.main(["reproduce", "3", "--out", str(tmp_path / "r")]) == 1
    assert cli.main(["tail", "--config", str(tmp_path / "missing.json")]) == 1


def test_sample_override_is_validated(tmp_path):
    assert cli.main(["mc", "--config", write(tmp_path, base()), "--samples", "5"]) == 1


def test_jsonable_non_finite():
    out = cli.jsonable({"a": math.inf, "b": [-math.inf, math.nan], 3: (1, 2.5)})
    assert out == {"a": "inf", "b": ["-inf", "nan"], "3": [1, 2.5]}
    assert json.loads(cli.dumps(out)) == out


def test_reproduce_example1(tmp_path):
    code = cli.main(["reproduce", "1", "--samples", "20000", "--out", str(tmp_path)])
    assert code == 0
    assert json.loads((tmp_path / "check.json").read_text())["theorem"] == "4"
    rows = read_csv(tmp_path / "tail.csv")
    assert len(rows) == 8
