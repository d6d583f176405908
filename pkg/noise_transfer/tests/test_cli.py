import csv
import json
from pathlib import Path

import pytest

from noise_transfer.cli.main import main


def _rows(path: Path) -> list[list[str]]:
    lines = [l for l in path.read_text(encoding="utf-8").splitlines() if not l.startswith("#")]
    return list(csv.reader(lines))


def test_state_stats_json(tmp_path: Path):
    code = main(["state-stats", "--state", "cat", "--alpha", "2", "--path", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "state_stats.json").read_text())
    assert data["partition"]["kind"] == "sign"
    assert data["stats"]["variance"] == pytest.approx(1.0, rel=0.01)
    assert len(data["config_hash"]) == 64


def test_state_stats_csv_and_replay(tmp_path: Path, capsys):
    args = ["state-stats", "--state", "gkp", "--delta2", "0.1", "--quadrature", "p", "--out", "csv", "--path", str(tmp_path)]
    assert main(args) == 0
    first = (tmp_path / "domains.csv").read_text()
    assert _rows(tmp_path / "domains.csv")[0] == ["n", "mean", "prob"]
    assert "# state=gkp0 quadrature=p" in first
    capsys.readouterr()
    assert main(["--config", str(tmp_path / "run_config.json")]) == 0
    assert (tmp_path / "domains.csv").read_text() == first


def test_state_stats_explicit_domains(tmp_path: Path):
    code = main(["state-stats", "--state", "vacuum", "--domains", "single", "--path", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "state_stats.json").read_text())
    assert data["stats"]["variance"] == pytest.approx(1.0, rel=1e-8)


def test_sweep_csv(tmp_path: Path):
    code = main(
        ["sweep", "--state", "gkp", "--param", "delta2", "--from", "0.05", "--to", "0.1", "--steps", "2", "--out", "csv", "--path", str(tmp_path)]
    )
    assert code == 0
    rows = _rows(tmp_path / "sweep_gkp0.csv")
    assert rows[0] == ["param", "V_q", "V_p", "clipped_fraction"]
    assert float(rows[2][0]) == pytest.approx(0.1)
    assert float(rows[2][1]) == pytest.approx(0.1, rel=0.05)


def test_sweep_json_several_families(tmp_path: Path):
    code = main(["sweep", "--states", "cat", "coherent", "--from", "1", "--to", "2", "--steps", "2", "--path", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "sweep.json").read_text())
    assert set(data["families"]) == {"cat", "coherent"}
    assert data["families"]["coherent"][0][1] == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize(
    "args",
    [
        ["sweep", "--state", "cat", "--from", "0", "--to", "1", "--steps", "0"],
        ["sweep", "--state", "gkp", "--param", "alpha", "--from", "0.1", "--to", "0.2", "--steps", "2"],
        ["sweep", "--state", "cat", "--from", "1", "--to", "1", "--steps", "3"],
        ["state-stats", "--state", "cat"],
        ["state-stats", "--state", "gkp", "--delta2", "1.5"],
        ["state-stats", "--state", "vacuum", "--domains", "lattice:zero"],
        ["circuit", "--model", "lossy", "--delta2", "0.1", "--eta", "1.5"],
        ["circuit", "--delta2", "0.1", "--rounds", "0"],
        ["loss-oracle", "--state", "vacuum", "--channel", "amp"],
        ["mc", "--trials", "0", "--delta2", "0.1"],
    ],
)
def test_invalid_parameters_exit_with_2(tmp_path: Path, args):
    assert main([*args, "--path", str(tmp_path)]) == 2


def test_circuit_json(tmp_path: Path, capsys):
    assert main(["circuit", "--delta2", "0.1", "--rounds", "2", "--path", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "circuit.json").read_text())
    assert [r["round"] for r in data["reports"]] == [1, 2]
    assert data["reports"][0]["v1"] == pytest.approx(0.2)
    assert data["reports"][0]["q_out"]["text"] == "-q_c1 - p_c2 + dq3 - e2"
    assert "round 2 (ideal)" in capsys.readouterr().out


def test_circuit_lossy_csv(tmp_path: Path):
    args = ["circuit", "--model", "lossy", "--delta2", "0.1", "--eta", "0.95", "--eta-g", "0.97", "--out", "csv", "--path", str(tmp_path)]
    assert main(args) == 0
    rows = _rows(tmp_path / "circuit_rounds.csv")
    assert rows[0][:3] == ["round", "v1", "v2"]
    assert float(rows[1][1]) > 0.2


def test_mc_writes_outcome_and_rates(tmp_path: Path):
    code = main(["mc", "--trials", "5000", "--seed", "7", "--delta2", "0.05", "--path", str(tmp_path)])
    assert code == 0
    outcome = json.loads((tmp_path / "mc_outcome.json").read_text())
    assert sum(outcome["outcome"]["counts"].values()) == 5000
    assert outcome["outcome"]["counts"]["none"] > 4900
    assert outcome["comparison"]["passed"] is True
    rows = _rows(tmp_path / "mc_rates.csv")
    assert [r[0] for r in rows[1:]] == ["none", "bit", "phase", "both"]


def test_loss_oracle(tmp_path: Path):
    args = ["loss-oracle", "--state", "coherent", "--alpha", "1", "--eta", "0.5", "--out", "csv", "--path", str(tmp_path)]
    assert main(args) == 0
    data = json.loads((tmp_path / "oracle.json").read_text())
    assert data["summary"]["regime"] == "localized"
    assert data["summary"]["rel_err"] < 1e-6
    assert (tmp_path / "oracle_grid.csv").exists()


def test_config_file_rejects_unknown_keys(tmp_path: Path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"command": "circuit", "delta2": 0.1, "colour": "red"}), encoding="utf-8")
    assert main(["--config", str(path)]) == 2
    path.write_text("{not json", encoding="utf-8")
    assert main(["--config", str(path)]) == 2
    assert main(["--config", str(tmp_path / "missing.json")]) == 2


def test_unknown_choice_is_an_argparse_error():
    with pytest.raises(SystemExit) as exc:
        main(["state-stats", "--state", "fock"])
    assert exc.value.code == 2


def test_default_output_dir_from_environment(isolated_output: Path):
    assert main(["state-stats", "--state", "vacuum"]) == 0
    assert (isolated_output / "state_stats.json").exists()
    assert (isolated_output / "run_config.json").exists()


def test_state_stats_reports_fringe_ratio(tmp_path: Path):
    assert main(["state-stats", "--state", "cat", "--alpha", "0.8", "--quadrature", "p", "--path", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "state_stats.json").read_text())
    assert data["peak_separation"]["advisory"] is True
    assert data["partition"]["kind"] == "lattice"
