# tests/test_cli.py
"""
End-to-end tests of the fvlab command line: exit codes, report files,
byte-identical reruns and golden reports.

Run: pytest tests/test_cli.py -v
"""
import csv
import io
import json
from pathlib import Path

import pytest

from fvlab import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, run

EXAMPLES = Path(__file__).resolve().parent.parent / "experiments"


@pytest.fixture
def run_example(tmp_path):
    """
    Factory running one example config into a temp report.

    Usage: code, report_text = run_example("sorkin", "--seed", "4")
    """

    def _run(name: str, *extra: str, out_name: str = "report.json"):
        out = tmp_path / out_name
        code = run(["--config", str(EXAMPLES / f"{name}.json"), "--out", str(out), *extra])
        text = out.read_text(encoding="utf-8") if out.exists() else None
        return code, text

    return _run


# =============================================================================
# EXIT CODES
# =============================================================================

class TestExitCodes:
    """0 when every check passes, 1 on a failed check, 2 on bad input."""

    @pytest.mark.parametrize("name", ["sorkin", "adversary", "adversary_repaired", "spacelike",
                                      "theorem2", "factorisation", "lemma1"])
    def test_examples_pass(self, run_example, name):
        """TEST: Shipped examples exit 0"""
        code, text = run_example(name)
        assert code == EXIT_OK
        assert json.loads(text)["passed"] is True

    def test_malformed_config(self, tmp_path):
        """TEST: Invalid JSON exits 2 without a report"""
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        out = tmp_path / "report.json"
        assert run(["--config", str(path), "--out", str(out)]) == EXIT_USAGE
        assert not out.exists()

    def test_missing_argument(self):
        """TEST: Omitting --config is a usage error"""
        assert run([]) == EXIT_USAGE

    def test_geometry_violation(self, tmp_path):
        """TEST: Charlie inside Bob's past exits 2"""
        raw = json.loads((EXAMPLES / "sorkin.json").read_text())
        raw["charlie"] = {"region": [[4, 0], [4, 1]], "observable": {"cell": [4, 1], "op": {"preset": "z"}}}
        path = tmp_path / "sorkin_bad.json"
        path.write_text(json.dumps(raw), encoding="utf-8")
        assert run(["--config", str(path), "--out", str(tmp_path / "r.json")]) == EXIT_USAGE

    def test_failed_adversary_search(self, tmp_path):
        """TEST: A Bob with identity gates finds no witness and exits 1"""
        raw = json.loads((EXAMPLES / "adversary.json").read_text())
        for coupling in raw["observers"][1]["couplings"]:
            coupling["gate"] = {"preset": "identity"}
        raw["budget"] = 2
        path = tmp_path / "adversary_idle.json"
        path.write_text(json.dumps(raw), encoding="utf-8")
        out = tmp_path / "r.json"
        assert run(["--config", str(path), "--out", str(out)]) == EXIT_CHECK_FAILED
        report = json.loads(out.read_text())
        assert report["passed"] is False
        assert "error" in report["checks"][0]["details"]


# =============================================================================
# REPORTS
# =============================================================================

class TestReports:
    """Report contents and determinism."""

    def test_report_fields(self, run_example):
        """TEST: The JSON report carries tool, digest, seed and checks"""
        _, text = run_example("sorkin")
        report = json.loads(text)
        assert report["tool"]["name"] == "fvlab"
        assert report["experiment"] == "sorkin"
        assert report["seed"] == 11
        assert len(report["config_digest"]) == 64
        assert [c["name"] for c in report["checks"]] == ["sorkin"]
        assert "wall_time_s" not in report

    def test_reruns_byte_identical(self, run_example):
        """TEST: Two runs of one config give identical bytes"""
        _, first = run_example("theorem2", out_name="a.json")
        _, second = run_example("theorem2", out_name="b.json")
        assert first == second

    def test_seed_override_reported(self, run_example):
        """TEST: --seed enters the report and its digest"""
        _, plain = run_example("sorkin", out_name="a.json")
        _, seeded = run_example("sorkin", "--seed", "4", out_name="b.json")
        assert json.loads(seeded)["seed"] == 4
        assert json.loads(seeded)["config_digest"] != json.loads(plain)["config_digest"]

    def test_timings_opt_in(self, run_example):
        """TEST: --timings adds the wall time"""
        _, text = run_example("spacelike", "--timings")
        assert json.loads(text)["wall_time_s"] >= 0.0

    def test_csv_format(self, run_example, tmp_path):
        """TEST: --format csv keeps the JSON report and adds one CSV row per check deviation"""
        code, text = run_example("spacelike", "--format", "csv")
        assert code == EXIT_OK
        assert json.loads(text)["experiment"] == "spacelike"
        rows = list(csv.reader(io.StringIO((tmp_path / "report.csv").read_text(encoding="utf-8"))))
        assert rows[0] == ["check", "passed", "deviation", "value"]
        assert {row[0] for row in rows[1:]} == {"spacelike_commutation"}
        assert all(row[1] == "True" for row in rows[1:])

    def test_csv_out_path(self, run_example, tmp_path):
        """TEST: --csv-out picks the summary path and implies the CSV output"""
        code, text = run_example("spacelike", "--csv-out", str(tmp_path / "summary.csv"))
        assert code == EXIT_OK
        assert json.loads(text)["passed"] is True
        assert (tmp_path / "summary.csv").read_text(encoding="utf-8").startswith("check,passed")

    @pytest.mark.parametrize("extra", [("--format", "csv"), ("--format", "csv", "--out", "r.csv")])
    def test_csv_without_json_target(self, tmp_path, extra):
        """TEST: A CSV summary with nowhere to go or overwriting the JSON report is a usage error"""
        args = ["--config", str(EXAMPLES / "spacelike.json")]
        args += [str(tmp_path / a) if a.endswith(".csv") else a for a in extra]
        assert run(args) == EXIT_USAGE

    def test_lemma1_expected_violation(self, run_example):
        """TEST: The non-local probe's localisation failure is reported as expected"""
        _, text = run_example("lemma1")
        checks = {c["name"]: c for c in json.loads(text)["checks"]}
        assert checks["lemma1:local"]["passed"] is True
        assert checks["lemma1:nonlocal"]["details"]["expected_violation"] is True


# =============================================================================
# GOLDEN REPORTS
# =============================================================================

class TestGoldenReports:
    """Default reports of the shipped examples are pinned byte for byte."""

    @pytest.mark.parametrize("path", sorted(EXAMPLES.glob("*.json")), ids=lambda p: p.stem)
    def test_report_matches_golden(self, tmp_path, golden, path):
        """TEST: Each shipped example reproduces its recorded report"""
        out = tmp_path / "report.json"
        assert run(["--config", str(path), "--out", str(out)]) in (EXIT_OK, EXIT_CHECK_FAILED)
        golden(path.stem, out.read_text(encoding="utf-8"))
