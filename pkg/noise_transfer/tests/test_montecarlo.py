import numpy as np
import pytest

from noise_transfer.analysis.montecarlo import (
    CLASSES,
    analytic_report,
    compare_with_analytic,
    comparison_rows,
    run_trials,
    sample_residues,
    verdict,
)
from noise_transfer.core.errors import build_ladder
from noise_transfer.core.exceptions import ConfigMismatchError
from noise_transfer.core.schema import LossConfig, TrialConfig, TrialOutcome
from noise_transfer.core.states import SQRT_2PI


def test_counts_do_not_depend_on_worker_count():
    cfg = TrialConfig(trials=20_000, seed=5, delta2=0.3)
    serial = run_trials(cfg, workers=1)
    threaded = run_trials(cfg, workers=3)
    assert serial.counts == threaded.counts
    assert serial.trials == 20_000


def test_seed_selects_the_stream():
    a = run_trials(TrialConfig(trials=20_000, seed=1, delta2=0.3))
    b = run_trials(TrialConfig(trials=20_000, seed=2, delta2=0.3))
    assert a.counts != b.counts


def test_tiny_noise_never_flips():
    outcome = run_trials(TrialConfig(trials=10_000, seed=3, delta2=0.01))
    assert outcome.counts["none"] == 10_000


def test_lossless_lossy_model_reproduces_ideal_counts():
    ideal = run_trials(TrialConfig(trials=10_000, seed=9, delta2=0.3))
    lossy = run_trials(TrialConfig(trials=10_000, seed=9, delta2=0.3, model="lossy", loss=LossConfig()))
    assert lossy.counts == ideal.counts


def test_ideal_circuit_agrees_with_ladders():
    cfg = TrialConfig(trials=100_000, seed=2024, delta2=0.1)
    outcome = run_trials(cfg)
    report = analytic_report(cfg)
    comparison = compare_with_analytic(outcome, report)
    assert comparison.passed
    phase_odd = build_ladder(0.2, SQRT_2PI, convention="centred").p_odd
    assert report.logical.p_phase_flip + report.logical.p_both == pytest.approx(phase_odd, rel=1e-9)


@pytest.mark.parametrize(
    "cfg",
    [
        TrialConfig(trials=40_000, seed=11, delta2=0.3),
        TrialConfig(trials=40_000, seed=12, delta2=0.1, model="lossy", loss=LossConfig(eta=0.95, eta_g=0.95, eta_m=0.95, eta_d=0.95)),
        TrialConfig(trials=40_000, seed=13, delta2=0.1, noisy_readout=True),
        TrialConfig(trials=40_000, seed=14, delta2=0.08, rounds=2),
        TrialConfig(trials=20_000, seed=15, delta2=0.1, mu=1, spike_model="exact"),
    ],
)
def test_variants_agree_with_analytic(cfg):
    outcome = run_trials(cfg)
    comparison = compare_with_analytic(outcome, analytic_report(cfg), threshold=4.0)
    assert comparison.passed, comparison.z


def test_residues_have_the_feedforward_variance():
    cfg = TrialConfig(trials=50_000, seed=21, delta2=0.2)
    residues = sample_residues(cfg)
    assert set(residues) == {"e1", "e2"}
    assert np.var(residues["e1"]) == pytest.approx(0.4, rel=0.03)
    assert np.var(residues["e2"]) == pytest.approx(0.6, rel=0.03)
    assert abs(np.mean(residues["e1"])) < 0.02


def test_comparison_rejects_empty_or_mismatched_outcomes():
    cfg = TrialConfig(trials=1_000, delta2=0.1)
    empty = TrialOutcome(config=cfg)
    with pytest.raises(ConfigMismatchError):
        compare_with_analytic(empty, analytic_report(cfg))
    outcome = run_trials(cfg)
    other = analytic_report(TrialConfig(trials=1_000, delta2=0.2))
    with pytest.raises(ConfigMismatchError):
        compare_with_analytic(outcome, other)


def test_verdict_and_rows():
    cfg = TrialConfig(trials=5_000, seed=4, delta2=0.1)
    outcome = run_trials(cfg)
    comparison = compare_with_analytic(outcome, analytic_report(cfg))
    rows = comparison_rows(outcome, comparison)
    assert [r[0] for r in rows] == list(CLASSES)
    assert sum(r[1] for r in rows) == 5_000
    text = verdict(outcome, comparison)
    assert text.startswith("trials=5000 seed=4 model=ideal")
    assert "threshold=3.0" in text
