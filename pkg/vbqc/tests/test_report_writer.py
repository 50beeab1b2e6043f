import csv
import json
from pathlib import Path

import numpy as np
import pytest

import report_writer
from report_writer import (
    OutputConfig,
    config_hash,
    load_experiment_config,
    pin_floats,
    summary_table,
    write_json_report,
    write_summary_csv,
)


def test_pin_floats_converts_numpy_values():
    pinned = pin_floats({"a": np.float64(0.1), 2: [np.int64(3), np.bool_(True)], "v": np.array([0.5, 1.5])})
    assert pinned == {"a": 0.1, "2": [3, True], "v": [0.5, 1.5]}
    assert type(pinned["2"][0]) is int
    assert type(pinned["2"][1]) is bool


def test_config_hash_ignores_key_order_and_numpy_types():
    a = {"seed": 1, "params": {"d": 5, "eps": 0.25}}
    b = {"params": {"eps": np.float64(0.25), "d": np.int64(5)}, "seed": 1}
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash({"seed": 2, "params": {"d": 5, "eps": 0.25}})


def test_load_experiment_config_checks_the_schema(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"schema": "vbqc-config/1", "d": 3}), encoding="utf-8")
    assert load_experiment_config(good)["d"] == 3
    other = tmp_path / "other.json"
    other.write_text(json.dumps({"schema": "jobs/2"}), encoding="utf-8")
    with pytest.raises(ValueError):
        load_experiment_config(other)
    listed = tmp_path / "list.json"
    listed.write_text("[]", encoding="utf-8")
    with pytest.raises(ValueError):
        load_experiment_config(listed)


def test_reports_are_written_under_new_directories(tmp_path):
    report = write_json_report(tmp_path / "a" / "report.json", {"b": 1, "a": np.float64(0.5)})
    text = report.read_text(encoding="utf-8")
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": 0.5, "b": 1}

    rows = [{"d": 2, "pass": True}, {"d": 3, "extra": 0.25}]
    summary = write_summary_csv(tmp_path / "b" / "summary.csv", rows)
    with summary.open(encoding="utf-8", newline="") as fh:
        read = list(csv.DictReader(fh))
    assert list(read[0]) == ["d", "pass", "extra"]
    assert read[1]["extra"] == "0.25"
    assert read[1]["pass"] == ""


def test_output_config_precedence(monkeypatch, tmp_path):
    monkeypatch.setenv("VBQC_SEED", "9")
    monkeypatch.setenv("VBQC_OUT_DIR", str(tmp_path))
    assert OutputConfig.from_env() == OutputConfig(tmp_path, 9)
    assert OutputConfig.from_env("elsewhere", 3) == OutputConfig(Path("elsewhere"), 3)
    assert OutputConfig.from_env(seed=0).seed == 0
    assert OutputConfig.from_env().path("x.json") == tmp_path / "x.json"


def test_summary_table_uses_every_column():
    table = summary_table("t", [{"a": 1}, {"b": 0.123456}])
    assert [c.header for c in table.columns] == ["a", "b"]
    assert table.row_count == 2


def test_module_documents_its_outputs():
    summary = report_writer.__doc__.strip().splitlines()[0]
    assert summary.startswith("Report Writer")
    assert "CSV" in summary
