import json

import pytest
from click.testing import CliRunner

from conftest import data_path
from rescuedispatch.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


class TestReplayCommand:
    def test_port_arthur_summary_line(self, runner):
        result = runner.invoke(main, ["replay", "--scenario",
                                      data_path("portarthur.json"),
                                      "--policy", "hybrid", "--units", "2"])
        assert result.exit_code == 0
        summary = [l for l in result.output.splitlines()
                   if l.startswith("tasks=")][0]
        mean = float(summary.split("mean_wait_min=")[1].split()[0])
        assert abs(mean - 136.7) <= 2

    def test_out_file_is_deterministic(self, runner, tmp_path):
        args = ["replay", "--scenario", data_path("portarthur.json"),
                "--policy", "hybrid", "--units", "2"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert runner.invoke(main, args + ["--out", str(a)]).exit_code == 0
        assert runner.invoke(main, args + ["--out", str(b)]).exit_code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_matches_golden_file(self, runner, tmp_path):
        out = tmp_path / "replay.json"
        runner.invoke(main, ["replay", "--scenario", data_path("portarthur.json"),
                             "--policy", "hybrid", "--units", "2",
                             "--out", str(out)])
        golden = open(data_path("golden_portarthur_hybrid_2units.json")).read()
        assert out.read_text() == golden

    def test_missing_file_exits_2(self, runner):
        result = runner.invoke(main, ["replay", "--scenario", "missing.json"])
        assert result.exit_code == 2

    def test_invalid_policy_is_usage_error(self, runner):
        result = runner.invoke(main, ["replay", "--scenario",
                                      data_path("portarthur.json"),
                                      "--policy", "random"])
        assert result.exit_code == 2

    def test_zero_units_is_usage_error(self, runner):
        result = runner.invoke(main, ["replay", "--scenario",
                                      data_path("portarthur.json"),
                                      "--units", "0"])
        assert result.exit_code == 2

    def test_malformed_scenario_exits_2(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"format": "scenario/1", "tasks": [
            {"id": "a", "arrival": "9:99"}]}))
        result = runner.invoke(main, ["replay", "--scenario", str(bad)])
        assert result.exit_code == 2
        assert "error" in result.output or result.exception


class TestBenchCommand:
    def test_single_cell(self, runner, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "workload": {"seed": 1, "count": 25},
            "seeds": [1], "policies": ["hybrid"], "unit_counts": [2]}))
        out = tmp_path / "bench.json"
        result = runner.invoke(main, ["bench", "--spec", str(spec),
                                      "--out", str(out)])
        assert result.exit_code == 0
        body = json.loads(out.read_text())
        assert body["format"] == "bench/1"
        assert len(body["cells"]) == 1

    def test_deterministic_tables(self, runner, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "workload": {"seed": 2, "count": 25},
            "seeds": [2], "policies": ["fcfs", "hybrid"], "unit_counts": [2]}))
        a = runner.invoke(main, ["bench", "--spec", str(spec)])
        b = runner.invoke(main, ["bench", "--spec", str(spec)])
        assert a.output == b.output

    def test_csv_export(self, runner, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "workload": {"seed": 1, "count": 10},
            "seeds": [1], "policies": ["hybrid"], "unit_counts": [2]}))
        csv_path = tmp_path / "awt.csv"
        result = runner.invoke(main, ["bench", "--spec", str(spec),
                                      "--csv", str(csv_path)])
        assert result.exit_code == 0
        assert csv_path.read_text().startswith("policy,units,seed,k,awt_minutes")


class TestGenerateCommand:
    def test_deterministic_output(self, runner, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for target in (a, b):
            result = runner.invoke(main, ["generate", "--seed", "7",
                                          "--count", "30", "--out", str(target)])
            assert result.exit_code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_generated_scenario_replays(self, runner, tmp_path):
        out = tmp_path / "scenario.json"
        runner.invoke(main, ["generate", "--seed", "3", "--count", "20",
                             "--out", str(out)])
        result = runner.invoke(main, ["replay", "--scenario", str(out),
                                      "--policy", "fcfs"])
        assert result.exit_code == 0


class TestTextCommands:
    def test_features_json(self, runner):
        result = runner.invoke(main, ["features", "--text",
                                      "Help!! 2 kids trapped?"])
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["exclamationMarks"] == 2
        assert body["digitVsWord"] == 0.25

    def test_features_requires_exactly_one_source(self, runner):
        assert runner.invoke(main, ["features"]).exit_code == 2

    def test_train_then_classify(self, runner, tmp_path):
        corpus = tmp_path / "corpus.csv"
        lines = ["text,rescue_needed,flood,water_needed,dcew,injured,sick"]
        for i in range(8):
            lines.append(f"flood water rising at house {i},1,1,0,0,0,0")
            lines.append(f"dry and safe tonight {i},0,0,0,0,0,0")
        corpus.write_text("\n".join(lines) + "\n")
        model = tmp_path / "model.json"
        result = runner.invoke(main, ["train", "--corpus", str(corpus),
                                      "--out", str(model),
                                      "--epochs", "150", "--hash-dim", "4096"])
        assert result.exit_code == 0, result.output
        classify = runner.invoke(main, ["classify", "--model", str(model),
                                        "--text", "flood water rising fast"])
        assert classify.exit_code == 0
        body = json.loads(classify.output)
        assert body["labels"]["flood"] == 1
