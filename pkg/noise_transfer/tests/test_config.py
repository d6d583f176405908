import os
from pathlib import Path

import pytest

from noise_transfer.core import config


def test_load_config_strips_comments(tmp_path: Path):
    path = tmp_path / "config.json"
    path.write_text(
        '{\n'
        '  # output location\n'
        '  "output_dir": "out",\n'
        '  // nested override\n'
        '  "numerics": {"ladder_tail": 1e-12}\n'
        '}\n',
        encoding="utf-8",
    )
    cfg = config.load_config(path)
    assert cfg["output_dir"] == "out"
    assert cfg["numerics"]["ladder_tail"] == 1e-12
    # untouched defaults survive the merge
    assert cfg["numerics"]["integration_epsrel"] == 1e-10
    assert cfg["montecarlo"]["block_size"] == 4096


def test_missing_file_gives_defaults(tmp_path: Path):
    cfg = config.load_config(tmp_path / "absent.json")
    assert cfg == config.DEFAULTS


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("NOISE_TRANSFER_OUTPUT_DIR", "/tmp/elsewhere")
    monkeypatch.setenv("NOISE_TRANSFER_LOG_LEVEL", "DEBUG")
    assert config.output_dir() == Path("/tmp/elsewhere")
    assert config.log_level() == "DEBUG"


def test_unknown_numeric_setting():
    with pytest.raises(KeyError):
        config.numeric_setting("no_such_setting")


def test_config_is_parsed_once_until_the_file_changes(tmp_path: Path):
    path = tmp_path / "config.json"
    path.write_text('{"ladder_convention": "centred"}', encoding="utf-8")
    os.utime(path, ns=(1_000_000_000, 1_000_000_000))
    first = config.load_config(path)
    misses = config._parse.cache_info().misses
    assert config.load_config(path) == first
    assert config._parse.cache_info().misses == misses

    path.write_text('{"ladder_convention": "printed"}', encoding="utf-8")
    os.utime(path, ns=(2_000_000_000, 2_000_000_000))
    assert config.load_config(path)["ladder_convention"] == "printed"
    assert config._parse.cache_info().misses == misses + 1


def test_loaded_config_is_a_private_copy(tmp_path: Path):
    path = tmp_path / "config.json"
    path.write_text('{"numerics": {"ladder_tail": 1e-12}}', encoding="utf-8")
    config.load_config(path)["numerics"]["ladder_tail"] = 0.5
    assert config.load_config(path)["numerics"]["ladder_tail"] == 1e-12
