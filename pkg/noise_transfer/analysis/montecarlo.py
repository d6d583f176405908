"""Semiclassical trajectories through the teleportation circuit.

Every prepared mode is sampled as lattice spike plus Gaussian fluctuation in
each quadrature, every vacuum symbol as a unit normal.  The measured
quadratures recorded by the engine are evaluated on these numbers, rounded
to the nearest lattice point and fed forward; the rounding residue relative
to the exact signal is the value of the shift symbol.  Treating ``q`` and
``p`` as independent classical variables is an approximation: no joint
quantum distribution exists.

Trials run in fixed-size blocks.  Block ``b`` draws from
``Philox(key=seed).jumped(b)``, so tallies depend only on the seed and the
block size, never on the number of worker threads.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from ..core.config import numeric_setting
from ..core.exceptions import ConfigMismatchError
from ..core.heisenberg import SIGNAL_KINDS, OperatorExpr, Symbol
from ..core.schema import (
    HALF_PI,
    CircuitReport,
    Comparison,
    LossConfig,
    StateModel,
    TrialConfig,
    TrialOutcome,
)
from ..core.states import density_grid, gkp, spikes
from ..core.templates import render
from .circuits import LATTICE, CircuitRun, build_report, iterate_runs

logger = logging.getLogger(__name__)

__all__ = [
    "CLASSES",
    "run_trials",
    "sample_residues",
    "analytic_report",
    "compare_with_analytic",
    "comparison_rows",
    "verdict",
]

CLASSES = ("none", "bit", "phase", "both")
_CLASS_INDEX = {(0, 0): "none", (1, 0): "bit", (0, 1): "phase", (1, 1): "both"}


def _loss_for(cfg: TrialConfig) -> LossConfig:
    return cfg.loss if cfg.model == "lossy" else LossConfig()


def _runs_for(cfg: TrialConfig, convention: Optional[str] = None) -> list[CircuitRun]:
    return iterate_runs(cfg.rounds, cfg.delta2, _loss_for(cfg), model=cfg.model, convention=convention)


def analytic_report(cfg: TrialConfig) -> CircuitReport:
    """Report of the last round of the circuit ``cfg`` describes.

    The trials round to the nearest lattice point, so the ladders use
    peak-centred bands.
    """
    return build_report(_runs_for(cfg, convention="centred")[-1])


class _MarginalSampler:
    """Inverse-CDF sampler of an exact quadrature marginal."""

    def __init__(self, state: StateModel, quadrature: str) -> None:
        grid = density_grid(state, quadrature)
        cdf = cumulative_trapezoid(grid.density, grid.x, initial=0.0)
        self.x = grid.x
        self.cdf = cdf / cdf[-1]

    def __call__(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.interp(rng.random(n), self.cdf, self.x)


@dataclass
class _Plan:
    cfg: TrialConfig
    runs: list[CircuitRun]
    symbols: list[Symbol]
    states: Dict[int, StateModel]
    samplers: Dict[tuple[int, str], _MarginalSampler]
    period: float


def _plan(cfg: TrialConfig) -> _Plan:
    runs = _runs_for(cfg)
    engine = runs[0].engine
    states: Dict[int, StateModel] = {runs[0].modes[0]: gkp(cfg.mu, cfg.delta2)}
    for run in runs:
        for m in run.modes[1:]:
            states.setdefault(m, gkp(0, cfg.delta2, rotation=HALF_PI))
    exprs: list[OperatorExpr] = []
    for run in runs:
        exprs += [run.p1, run.p2, run.q_out, run.p_out, run.bin1.signal, run.bin2.signal]
    found = {s for e in exprs for s in e.terms if s.kind != "ErrShift"}
    # every prepared mode is sampled, referenced or not, so streams stay aligned
    for m in states:
        for kind in ("SignalQ", "SignalP", "FlucQ", "FlucP"):
            found.add(Symbol(kind, m, m))
    symbols = sorted(found, key=lambda s: s.sort_key)
    samplers = {}
    if cfg.spike_model == "exact":
        for m, state in states.items():
            for quad in ("q", "p"):
                samplers[(m, quad)] = _MarginalSampler(state, quad)
    logger.debug(
        "montecarlo plan: rounds=%d symbols=%d bound=%s",
        cfg.rounds,
        len(symbols),
        engine.bindings.to_dict(),
    )
    return _Plan(cfg, runs, symbols, states, samplers, LATTICE.period)


def _draw(plan: _Plan, rng: np.random.Generator, n: int) -> Dict[Symbol, np.ndarray]:
    bindings = plan.runs[0].engine.bindings
    d = plan.period
    values: Dict[Symbol, np.ndarray] = {}
    for sym in plan.symbols:
        if sym in values:
            continue
        quad = "q" if sym.kind in ("SignalQ", "FlucQ") else "p"
        if sym.kind in ("SignalQ", "SignalP"):
            state = plan.states[sym.mode]
            fluc = Symbol("FlucQ" if quad == "q" else "FlucP", sym.mode, sym.mode)
            if plan.cfg.spike_model == "exact":
                x = plan.samplers[(sym.mode, quad)](rng, n)
                idx = np.floor(x / d + 0.5)
                values[sym] = idx * d
                values[fluc] = x - idx * d
            else:
                j, w = spikes(state, quad)
                values[sym] = rng.choice(j, size=n, p=w) * d
                values[fluc] = rng.normal(0.0, math.sqrt(bindings.variance(fluc)), n)
        elif sym.kind in ("FlucQ", "FlucP"):
            # drawn together with the matching signal
            continue
        else:
            values[sym] = rng.standard_normal(n)
    return values


def _bin(value: np.ndarray, period: float) -> np.ndarray:
    return np.floor(value / period + 0.5) * period


def _simulate(plan: _Plan, rng: np.random.Generator, n: int) -> tuple[Dict[str, int], Dict[str, np.ndarray]]:
    values = _draw(plan, rng, n)
    d = plan.period
    residues: Dict[str, np.ndarray] = {}
    for run in plan.runs:
        for b in (run.bin1, run.bin2):
            measured = (b.measured * b.rescale).evaluate(values)
            exact = b.signal.evaluate(values)
            residues[b.err.name] = measured - exact
            values[b.err] = _bin(measured, d) - exact
    last = plan.runs[-1]
    flips = []
    for expr in (last.q_out, last.p_out):
        expected = expr.select(SIGNAL_KINDS).evaluate(values)
        if plan.cfg.noisy_readout:
            observed = _bin(expr.evaluate(values), d)
        else:
            observed = expr.discrete_part().evaluate(values)
        shift = np.rint((observed - expected) / d).astype(np.int64)
        flips.append(shift % 2)
    counts = {name: 0 for name in CLASSES}
    for (fq, fp), name in _CLASS_INDEX.items():
        counts[name] = int(np.count_nonzero((flips[0] == fq) & (flips[1] == fp)))
    return counts, residues


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(block))


def _block_sizes(trials: int, block_size: int) -> list[int]:
    full, rest = divmod(trials, block_size)
    return [block_size] * full + ([rest] if rest else [])


def run_trials(cfg: TrialConfig, *, workers: Optional[int] = None) -> TrialOutcome:
    """Tally logical outcomes of ``cfg.trials`` sampled trajectories."""
    plan = _plan(cfg)
    block_size = int(numeric_setting("block_size"))
    workers = workers or int(numeric_setting("workers"))
    sizes = _block_sizes(cfg.trials, block_size)

    def block(b: int) -> Dict[str, int]:
        counts, _ = _simulate(plan, _block_rng(cfg.seed, b), sizes[b])
        return counts

    logger.info(
        "Process: run_trials | Trials: %d | Blocks: %d | Workers: %d | Seed: %d",
        cfg.trials,
        len(sizes),
        workers,
        cfg.seed,
    )
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(block, range(len(sizes))))
    totals = {name: sum(r[name] for r in results) for name in CLASSES}
    return TrialOutcome(config=cfg, counts=totals)


def sample_residues(cfg: TrialConfig) -> Dict[str, np.ndarray]:
    """Rounding-free residues ``measured - signal`` of every binned measurement."""
    block_size = int(numeric_setting("block_size"))
    plan = _plan(cfg)
    parts: Dict[str, list[np.ndarray]] = {}
    for b, size in enumerate(_block_sizes(cfg.trials, block_size)):
        _, residues = _simulate(plan, _block_rng(cfg.seed, b), size)
        for name, arr in residues.items():
            parts.setdefault(name, []).append(arr)
    return {name: np.concatenate(arrs) for name, arrs in parts.items()}


def _same_circuit(cfg: TrialConfig, report: CircuitReport) -> bool:
    return (
        report.model == cfg.model
        and report.round == cfg.rounds
        and math.isclose(report.delta2_resource, cfg.delta2, rel_tol=1e-12)
        and (cfg.model == "ideal" or report.loss == cfg.loss)
    )


def compare_with_analytic(
    outcome: TrialOutcome, report: CircuitReport, threshold: Optional[float] = None
) -> Comparison:
    """Binomial z-score of each observed class rate against the prediction."""
    n = outcome.trials
    if n == 0:
        raise ConfigMismatchError("outcome holds no trials")
    if not _same_circuit(outcome.config, report):
        raise ConfigMismatchError("trial config and report describe different circuits")
    threshold = float(threshold if threshold is not None else numeric_setting("z_threshold"))
    logical = report.logical_readout if outcome.config.noisy_readout else report.logical
    if logical is None:
        raise ConfigMismatchError("report carries no readout prediction")
    predicted = logical.as_dict()
    observed = outcome.rates()
    z: Dict[str, float] = {}
    for name in CLASSES:
        p = min(max(predicted[name], 0.0), 1.0)
        # a certain prediction gets the resolution of a single trial
        se = max(math.sqrt(p * (1 - p) / n), 1 / n)
        z[name] = (observed[name] - p) / se
    passed = all(abs(v) <= threshold for v in z.values())
    logger.info(
        "Process: compare_with_analytic | Passed: %s | z: %s",
        passed,
        {k: round(v, 3) for k, v in z.items()},
    )
    return Comparison(passed=passed, threshold=threshold, z=z, predicted=predicted, observed=observed)


def comparison_rows(outcome: TrialOutcome, comparison: Comparison) -> list[tuple]:
    """CSV rows ``(class, count, observed, predicted, stderr, z)``."""
    errs = outcome.standard_errors()
    return [
        (
            name,
            outcome.counts[name],
            comparison.observed[name],
            comparison.predicted[name],
            errs[name],
            comparison.z[name],
        )
        for name in CLASSES
    ]


def verdict(outcome: TrialOutcome, comparison: Comparison) -> str:
    return render(
        "mc_verdict",
        trials=outcome.trials,
        seed=outcome.config.seed,
        model=outcome.config.model,
        classes=CLASSES,
        comparison=comparison,
    )
