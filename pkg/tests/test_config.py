from __future__ import annotations

import json

import pytest
from pydantic import ValidationError

from app.config import SystemConfig, build_config, emit_config, load_config, load_config_file, load_settings, validate
from app.errors import (
    ConfigSchemaError,
    ConfigValidationError,
    OutputError,
    SchedulingError,
    SimulatorError,
)


def test_empty_document_gives_scenario_defaults():
    cfg = load_config("")
    assert (cfg.num_cells, cfg.pilot_len, cfg.intercell_factor) == (7, 30, 0.3)
    assert (cfg.num_users, cfg.frame_len, cfg.max_class) == (30, 99, 30)
    assert cfg.num_antennas == 100
    assert cfg.uplink_power == cfg.downlink_power == 1.0
    assert cfg.num_pilots == cfg.pilot_len
    assert cfg.persistence_tol == 0.05
    assert cfg.rng_seed == 1
    assert cfg.demotion_mode == "step"
    assert cfg.evaluation_period == 1
    assert cfg == SystemConfig()
    assert load_config("{}") == cfg


@pytest.mark.parametrize(
    "doc, field",
    [
        ({"intercell_factor": 1.5}, "intercell_factor"),
        ({"pilot_len": 99, "frame_len": 99}, "frame_len"),
        ({"uplink_power": 0}, "uplink_power"),
        ({"max_class": 0}, "max_class"),
        ({"persistence_tol": 1.0}, "persistence_tol"),
        ({"num_cells": -1}, "num_cells"),
    ],
)
def test_out_of_range_values_are_validation_errors(doc, field):
    with pytest.raises(ConfigValidationError) as ei:
        load_config(json.dumps(doc))
    assert ei.value.field == field
    assert field in str(ei.value)
    assert ei.value.exit_code == 1


@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        "[1, 2, 3]",
        json.dumps({"num_cels": 7}),
        json.dumps({"num_cells": "seven"}),
        json.dumps({"demotion_mode": "sometimes"}),
    ],
)
def test_malformed_documents_are_schema_errors(text):
    with pytest.raises(ConfigSchemaError):
        load_config(text)


def test_unknown_key_names_the_key():
    with pytest.raises(ConfigSchemaError) as ei:
        load_config(json.dumps({"num_cels": 7}))
    assert ei.value.field == "num_cels"


def test_dependent_defaults_follow_their_source():
    cfg = build_config(uplink_power=0.1, pilot_len=20)
    assert cfg.downlink_power == 0.1
    assert cfg.num_pilots == 20
    cfg = build_config(uplink_power=0.1, downlink_power=0.5, num_pilots=40)
    assert cfg.downlink_power == 0.5
    assert cfg.num_pilots == 40


@pytest.mark.parametrize(
    "values",
    [
        {},
        {"num_cells": 3, "intercell_factor": 0.0, "rng_seed": 2**63},
        {"pilot_len": 10, "frame_len": 11, "uplink_power": 0.05, "demotion_mode": "reset"},
        {"num_pilots": 64, "max_class": 1, "persistence_tol": 0.2, "evaluation_period": 4},
    ],
)
def test_emit_then_load_is_identity(values):
    cfg = build_config(**values)
    assert load_config(emit_config(cfg)) == cfg


def test_validate_accepts_defaults_and_rejects_bad_values():
    cfg = SystemConfig()
    assert validate(cfg) is cfg
    bad = SystemConfig.model_construct(uplink_power=0.0)
    with pytest.raises(ConfigValidationError) as ei:
        validate(bad)
    assert ei.value.field == "uplink_power"


def test_config_is_frozen():
    cfg = SystemConfig()
    with pytest.raises(ValidationError):
        cfg.num_cells = 3  # type: ignore[misc]


def test_load_config_file(tmp_path):
    p = tmp_path / "scenario.json"
    p.write_text(json.dumps({"num_antennas": 300}), encoding="utf-8")
    assert load_config_file(p).num_antennas == 300
    assert load_config_file(None) == SystemConfig()
    with pytest.raises(OutputError) as ei:
        load_config_file(tmp_path / "missing.json")
    assert ei.value.exit_code == 3


def test_error_exit_codes():
    assert SimulatorError("x").exit_code == 1
    assert ConfigSchemaError("x").exit_code == 1
    assert SchedulingError("x").exit_code == 2
    assert OutputError("x").exit_code == 3


def test_settings_from_env(monkeypatch):
    monkeypatch.setenv("MMIMO_TRIAL_WORKERS", "3")
    monkeypatch.setenv("MMIMO_METRICS_ENABLED", "false")
    s = load_settings()
    assert s.trial_workers == 3
    assert s.metrics_enabled is False


@pytest.mark.parametrize("name, value", [("MMIMO_TRIAL_WORKERS", "0"), ("MMIMO_MAX_QUEUE_SIZE", "0")])
def test_settings_reject_bad_values(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ValidationError):
        load_settings()
