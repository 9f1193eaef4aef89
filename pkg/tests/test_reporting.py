"""Tests for report files."""
import json

import pandas as pd
import pytest

from oamsim.core.exceptions import ReportError
from oamsim.core.parameters import load_config, serialize_config
from oamsim.models.report import Scenario
from oamsim.reporting.report_generator import ReportGenerator


@pytest.fixture
def sww_report(orchestrator):
    return orchestrator.run_scenario(Scenario("sww_only", seed=7, overrides={"pulses": 20_000_000}))


def test_reports_are_byte_identical(orchestrator, sww_report, tmp_path):
    generator = ReportGenerator()
    again = orchestrator.run_scenario(Scenario("sww_only", seed=7, overrides={"pulses": 20_000_000}))
    first = generator.emit_report(sww_report, "json", tmp_path / "a")
    second = generator.emit_report(again, "json", tmp_path / "b")
    assert first[0].read_bytes() == second[0].read_bytes()


def test_json_report_content(sww_report, tmp_path):
    [path] = ReportGenerator().emit_report(sww_report, "json", tmp_path / "run.txt")
    assert path.suffix == ".json"
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["scenario"]["seed"] == 7
    assert data["coincidence"]["config_hash"] == data["config_hash"]
    assert len(data["coincidence"]["acc"]) == 14
    assert "histogram" not in data


def test_csv_histogram(sww_report, tmp_path):
    paths = ReportGenerator().emit_report(sww_report, "csv", tmp_path / "run")
    assert [p.suffix for p in paths] == [".json", ".csv"]
    frame = pd.read_csv(paths[1])
    assert len(frame) == sww_report.histogram.n_bins
    assert frame["count"].sum() == sww_report.histogram.total


def test_sweep_table_csv(orchestrator, tmp_path):
    report = orchestrator.run_scenario(Scenario("spectrum_sweep", overrides={"grid": [1550.0, 1552.0, 0.01]}))
    paths = ReportGenerator().emit_report(report, "csv", tmp_path / "sweep")
    frame = pd.read_csv(paths[1])
    assert list(frame.columns) == ["wavelength_nm", "transmission"]
    assert len(frame) == 201


def test_unknown_format(sww_report, tmp_path):
    with pytest.raises(ReportError):
        ReportGenerator().emit_report(sww_report, "xml", tmp_path / "run")


def test_config_hash_survives_a_file_round_trip(config, sww_report, tmp_path):
    path = tmp_path / "experiment.toml"
    path.write_text(serialize_config(config), encoding="utf-8")
    assert load_config(path).config_hash() == sww_report.config_hash


def test_summary(sww_report):
    summary = ReportGenerator().summary(sww_report)
    assert summary["scenario"] == "sww_only"
    assert summary["CC"] == sww_report.coincidence.cc
