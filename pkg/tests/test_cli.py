import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from campustrace.cli import main

CFG = ["--start-date", "2022-04-14", "--window-days", "14"]


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def dataset_dir(runner, fixture5, tmp_path):
    manifest, fixture_dir, _ = fixture5
    files = [str(fixture_dir / manifest["files"][uid]) for uid in manifest["users"]]
    out = tmp_path / "dataset"
    result = runner.invoke(main, ["ingest", "--dataset", str(out), *files])
    assert result.exit_code == 0, result.output
    return out


class TestGenerateAndIngest:
    def test_generate_writes_files(self, runner, tmp_path):
        out = tmp_path / "gen"
        result = runner.invoke(main, ["generate", "--out", str(out), "--seed", "3", "--users", "5", "--days", "2"])
        assert result.exit_code == 0, result.output
        assert (out / "manifest.json").exists()
        assert len(list(out.glob("U*.json"))) == 5

    def test_ingest_reports_counts(self, runner, fixture5, tmp_path):
        manifest, fixture_dir, _ = fixture5
        f = str(fixture_dir / manifest["files"]["U00"])
        result = runner.invoke(main, ["ingest", "--dataset", str(tmp_path / "d"), f])
        assert result.exit_code == 0
        assert "U00: parsed=" in result.output
        assert (tmp_path / "d" / "metadata.json").exists()


class TestAnalyzeTraceExport:
    def test_analyze_writes_events_csv(self, runner, dataset_dir, tmp_path):
        out = tmp_path / "events.csv"
        result = runner.invoke(main, ["analyze", "--dataset", str(dataset_dir), "--out", str(out), *CFG])
        assert result.exit_code == 0, result.output
        lines = out.read_text().splitlines()
        assert lines[0].startswith("user_a,user_b")
        assert len(lines) > 1

    def test_analyze_methods_agree(self, runner, dataset_dir, tmp_path):
        a, b = tmp_path / "grid.csv", tmp_path / "naive.csv"
        assert runner.invoke(main, ["analyze", "--dataset", str(dataset_dir), "--out", str(a), *CFG]).exit_code == 0
        assert (
            runner.invoke(
                main, ["analyze", "--dataset", str(dataset_dir), "--out", str(b), "--method", "naive", *CFG]
            ).exit_code
            == 0
        )
        assert a.read_bytes() == b.read_bytes()

    def test_trace_requires_index_user(self, runner, dataset_dir, tmp_path):
        result = runner.invoke(main, ["trace", "--dataset", str(dataset_dir), "--out", str(tmp_path / "l.csv"), *CFG])
        assert result.exit_code != 0
        assert "--index-user" in result.output

    def test_trace_writes_levels(self, runner, dataset_dir, tmp_path):
        out = tmp_path / "levels.csv"
        result = runner.invoke(
            main, ["trace", "--dataset", str(dataset_dir), "--out", str(out), "--index-user", "U00", *CFG]
        )
        assert result.exit_code == 0, result.output
        body = out.read_text().splitlines()[1:]
        levels = {row.split(",")[0]: int(row.split(",")[1]) for row in body}
        assert levels["U01"] == 1 and levels["U02"] == 2 and levels["U03"] == 3

    def test_export_geojson(self, runner, dataset_dir, tmp_path):
        out = tmp_path / "tracks.geojson"
        result = runner.invoke(main, ["export", "--dataset", str(dataset_dir), "--format", "geojson", "--out", str(out)])
        assert result.exit_code == 0
        doc = json.loads(out.read_text())
        assert doc["type"] == "FeatureCollection"
        assert len(doc["features"]) == 5

    def test_export_kml(self, runner, dataset_dir, tmp_path):
        out = tmp_path / "tracks.kml"
        result = runner.invoke(main, ["export", "--dataset", str(dataset_dir), "--format", "kml", "--out", str(out)])
        assert result.exit_code == 0
        assert out.read_text().startswith("<?xml")


class TestSegmentsCommand:
    def test_segments_to_csv(self, runner, tmp_path):
        src = Path(__file__).parent / "data" / "sample_segments.json"
        out = tmp_path / "segments.csv"
        result = runner.invoke(main, ["segments", str(src), "--out", str(out), "--user-id", "202110320585"])
        assert result.exit_code == 0, result.output
        golden = (Path(__file__).parent / "data" / "sample_segments_golden.csv").read_text()
        assert out.read_text() == golden


class TestSimulateCommand:
    def test_series_and_figure(self, runner, tmp_path):
        out, fig = tmp_path / "series.csv", tmp_path / "fig.png"
        result = runner.invoke(
            main,
            ["simulate", "--beta", "0.5", "--gamma", "0.1", "--mu", "0", "--mu", "0.5", "--out", str(out), "--fig", str(fig)],
        )
        assert result.exit_code == 0, result.output
        assert out.read_text().startswith("t,s,e,i,r")
        assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        assert "mu=0.5" in result.output


class TestReportCommand:
    def test_report_writes_tables_and_figures(self, runner, dataset_dir, tmp_path):
        out = tmp_path / "report"
        result = runner.invoke(
            main, ["report", "--dataset", str(dataset_dir), "--out-dir", str(out), "--index-user", "U00", *CFG]
        )
        assert result.exit_code == 0, result.output
        for name in ("events.csv", "levels.csv", "report.csv", "scores.csv", "epidemic.csv", "tracks.geojson"):
            assert (out / name).exists(), name
        for name in ("map.png", "epidemic.png", "mu_sweep.png"):
            assert (out / name).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n", name
        report_lines = (out / "report.csv").read_text().splitlines()
        assert report_lines[0] == "user_id,date,time,latitude,longitude,visited_location,contact_level"
        # 5-user script: U01 and U04 direct, then the U02/U03 chain
        users_by_level = [(line.split(",")[0], line.split(",")[-1]) for line in report_lines[1:]]
        assert users_by_level == [("U01", "1"), ("U04", "1"), ("U02", "2"), ("U03", "3")]
