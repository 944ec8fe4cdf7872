import csv
import io
import json
import pathlib
import subprocess
import sys

import jsonschema
import pytest

from unsharp.cli import main

SCHEMA = json.loads((pathlib.Path(__file__).parents[1] / "docs" / "report.schema.json").read_text())
TRINE = "1,0,0;-0.5,0.8660254037844386,0;-0.5,-0.8660254037844386,0"


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    return code, doc


class TestThresholds:
    @pytest.mark.parametrize(
        "name, want", [("pair-xz", 0.7071), ("trine-triple", 0.6667), ("trine-pair", 0.7321), ("triple-xyz", 0.5774)]
    )
    def test_named_sets(self, capsys, name, want):
        code, doc = run_json(capsys, "thresholds", "--set", name)
        assert code == 0
        assert doc["results"]["eta_star"] == pytest.approx(want, abs=5e-3)
        assert doc["results"]["probe_count"] == len(doc["results"]["probes"])

    def test_custom_axes(self, capsys):
        code, doc = run_json(capsys, "thresholds", "--axes", "1,0,0;0,0,1")
        assert code == 0 and doc["results"]["eta_star"] == pytest.approx(0.7071, abs=5e-3)

    def test_set_and_axes_exclusive(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["thresholds", "--set", "pair-xz", "--axes", "1,0,0;0,0,1"])
        assert exc.value.code == 2


class TestGame:
    def test_sharp(self, capsys):
        _, doc = run_json(capsys, "game", "--eta", "1")
        assert doc["results"]["lhs"] == 0.0

    def test_edge(self, capsys):
        _, doc = run_json(capsys, "game", "--eta", "0.7071")
        assert doc["results"]["lhs"] == pytest.approx(1.2018, abs=1e-4)
        assert doc["results"]["steering_violated"] is False

    def test_violated(self, capsys):
        _, doc = run_json(capsys, "game", "--eta", "0.9")
        assert doc["results"]["steering_violated"] is True

    def test_sweep(self, capsys):
        _, doc = run_json(capsys, "game", "--sweep", "0:1:0.25")
        assert [e["eta"] for e in doc["results"]["sweep"]] == [0, 0.25, 0.5, 0.75, 1.0]

    def test_samples(self, capsys):
        _, doc = run_json(capsys, "game", "--eta", "0.5", "--samples", "20000", "--seed", "5")
        assert doc["meta"]["seed"] == 5
        assert doc["results"]["empirical"]["corr_x"] == pytest.approx(-0.5, abs=0.03)

    def test_eta_out_of_range(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["game", "--eta", "1.5"])
        assert exc.value.code == 2


class TestMoments:
    def test_half(self, capsys):
        _, doc = run_json(capsys, "moments", "--eta", "0.5")
        assert doc["results"]["eigenvalues"] == pytest.approx([0.25, 1.25, 1.25, 1.25], abs=1e-12)
        assert doc["results"]["positive"] is True

    def test_beyond(self, capsys):
        _, doc = run_json(capsys, "moments", "--eta", "0.8")
        assert doc["results"]["eigenvalues"][0] == pytest.approx(-0.2, abs=1e-12)
        assert doc["results"]["positive"] is False

    def test_boundary(self, capsys):
        _, doc = run_json(capsys, "moments", "--eta", "0.6667")
        assert doc["results"]["eigenvalues"][0] == pytest.approx(0.0, abs=1e-4)


class TestCompat:
    def test_feasible_witness(self, capsys):
        code, doc = run_json(capsys, "compat", "--axes", "1,0,0;0,0,1", "--eta", "0.70")
        assert code == 0
        assert doc["results"]["verdict"] == "Feasible"
        by_outcome = {tuple(w["outcome"]): w for w in doc["results"]["witness"]}
        for (x, z), w in by_outcome.items():
            assert w["a"] == pytest.approx(0.25, abs=1e-7)
            assert w["b"] == pytest.approx([0.175 * x, 0.0, 0.175 * z], abs=1e-7)

    def test_infeasible_pair(self, capsys):
        code, doc = run_json(capsys, "compat", "--axes", "1,0,0;0,0,1", "--eta", "0.75")
        assert code == 0 and doc["results"]["verdict"] == "Infeasible"

    def test_infeasible_triple(self, capsys):
        _, doc = run_json(capsys, "compat", "--axes", "1,0,0;0,1,0;0,0,1", "--eta", "0.60")
        assert doc["results"]["verdict"] == "Infeasible"

    def test_indeterminate_exit(self, capsys):
        code, doc = run_json(capsys, "compat", "--axes", TRINE, "--eta", "0.666", "--max-iter", "3")
        assert code == 3 and doc["results"]["verdict"] == "Indeterminate"

    @pytest.mark.parametrize("axes", ["0,0,0;1,0,0", "1,0;0,1", "a,b,c;1,0,0"])
    def test_bad_axes(self, axes):
        with pytest.raises(SystemExit) as exc:
            main(["compat", "--axes", axes, "--eta", "0.5"])
        assert exc.value.code == 2

    @pytest.mark.parametrize("axes", ["1,0,0", "1,0,0;0,1,0;0,0,1;1,1,1"])
    def test_wrong_axis_count(self, capsys, axes):
        assert main(["compat", "--axes", axes, "--eta", "0.5"]) == 2
        assert "2 or 3 axes" in capsys.readouterr().err


class TestSerialisation:
    def test_csv(self, capsys):
        code, out = run(capsys, "moments", "--eta", "0.5", "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0
        assert rows[0] == ["key", "value"]
        keys = [r[0] for r in rows[1:]]
        assert len(keys) == len(set(keys))
        assert "correlations.c12" in keys

    def test_twelve_significant_digits(self, capsys):
        _, doc = run_json(capsys, "game", "--eta", "0.7071")
        assert doc["results"]["lhs"] == float(f"{doc['results']['lhs']:.12g}")
        assert len(repr(doc["results"]["lhs"]).replace(".", "").lstrip("0")) <= 12

    def test_repeat_runs_identical(self, capsys):
        argv = ("game", "--eta", "0.5", "--samples", "100000", "--seed", "11")
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "unsharp", "game", "--eta", "1", "--format", "csv"],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0
    assert out.stdout.startswith("key,value\n")


def test_usage_error_from_library(capsys):
    # numeric input that passes argparse but fails a domain check
    code = main(["game", "--eta", "0.5", "--samples", "10", "--seed", "-1"])
    assert code == 2
    assert "error" in capsys.readouterr().err


@pytest.mark.slow
def test_repro_all(capsys):
    code, doc = run_json(capsys, "repro-all")
    assert code == 0
    assert doc["results"]["all_ok"] is True
    assert doc["results"]["failed"] == []
