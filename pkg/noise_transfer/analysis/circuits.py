"""Three-mode CZ teleportation with binned feedforward.

Mode 1 carries the input, modes 2 and 3 are "+" resources.  After
``CZ(1,2)`` and ``CZ(2,3)`` the momenta of modes 1 and 2 are measured,
rounded onto the ``sqrt(2 pi)`` lattice and fed forward into the momentum
and position of mode 3, which becomes the output.

The lossy variant adds, in order: preparation loss ``eta`` on all three
inputs, an extra ``eta_g`` beamsplitter on mode 3, gate loss ``eta_g`` on
both rails immediately before each CZ, detector efficiency ``eta_m``, a
phase-insensitive amplifier on mode 3 and displacement loss ``eta_d``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional

from ..core.errors import build_ladder, classify_logical
from ..core.exceptions import DomainError
from ..core.heisenberg import BinResult, Engine, OperatorExpr, Symbol
from ..core.schema import CircuitReport, DomainPartition, Gains, LossConfig
from ..core.states import SQRT_2PI
from ..core.templates import render

logger = logging.getLogger(__name__)

__all__ = [
    "LATTICE",
    "CircuitRun",
    "balanced_gains",
    "printed_v1",
    "printed_v2",
    "printed_output_variances",
    "vacuum_groups",
    "teleport",
    "run_ideal",
    "run_lossy",
    "iterate",
    "iterate_runs",
    "build_report",
    "summary",
]

LATTICE = DomainPartition(kind="lattice", period=SQRT_2PI)

Model = Literal["ideal", "lossy"]


@dataclass
class CircuitRun:
    """Everything one teleportation round left behind in its engine."""

    engine: Engine
    model: Model
    round: int
    loss: LossConfig
    gains: Gains
    delta2_input: float
    delta2_resource: float
    modes: tuple[int, int, int]
    p1: OperatorExpr
    p2: OperatorExpr
    bin1: BinResult
    bin2: BinResult
    q_out: OperatorExpr
    p_out: OperatorExpr
    convention: Optional[str] = None

    @property
    def output_mode(self) -> int:
        return self.modes[2]


def balanced_gains(loss: LossConfig) -> Gains:
    """Feedforward and amplifier gains that restore unit signal coefficients."""
    eta, eta_g, eta_m, eta_d = loss.eta, loss.eta_g, loss.eta_m, loss.eta_d
    return Gains(
        g1=-1 / math.sqrt(eta * eta_g * eta_m),
        g2=-1 / math.sqrt(eta * eta_g**2 * eta_m),
        g=1 / math.sqrt(eta * eta_g**2 * eta_d),
    )


def printed_v1(delta2_input: float, delta2_resource: float, loss: LossConfig) -> float:
    a = loss.eta * loss.eta_g
    return delta2_input + delta2_resource + 2 * (1 / a - 1) + (1 / a) * (1 / loss.eta_m - 1)


def printed_v2(delta2_input: float, delta2_resource: float, loss: LossConfig) -> float:
    # counts the second gate loss on rail 2 once per contribution
    b = loss.eta * loss.eta_g**2
    return delta2_input + 2 * delta2_resource + 3 * (1 / b - 1) + (1 / b) * (1 / loss.eta_m - 1)


def printed_output_variances(delta2_resource: float, loss: LossConfig) -> tuple[float, float]:
    """``(V_q_out, V_p_out)`` of the balanced circuit."""
    b = 1 / (loss.eta * loss.eta_g**2)
    amp = b - loss.eta_d
    det = 1 - loss.eta_d
    v_q = delta2_resource + (b - 1) + amp + det
    v_p = 2 * delta2_resource + 2 * (b - 1) + amp + det
    return v_q, v_p


def vacuum_groups(expr: OperatorExpr) -> dict[tuple[str, int, str], float]:
    """Summed squared coefficients of vacuum symbols per ``(kind, rail, origin)``.

    Several independent vacua entering the same rail at the same kind of
    element act as one collective vacuum with this variance.
    """
    groups: dict[tuple[str, int, str], float] = {}
    for sym, coeff in expr.terms.items():
        if sym.kind in ("VacQ", "VacP", "MeasNoiseQ", "MeasNoiseP"):
            key = (sym.kind, sym.mode, sym.origin)
            groups[key] = groups.get(key, 0.0) + coeff * coeff
    return groups


def _sign(x: float) -> float:
    return -1.0 if x < 0 else 1.0


def teleport(
    engine: Engine,
    input_mode: int,
    delta2_resource: float,
    loss: LossConfig,
    gains: Gains,
    *,
    model: Model = "lossy",
    round_no: int = 1,
    delta2_input: float = 0.0,
    convention: Optional[str] = None,
) -> CircuitRun:
    """Run one round on ``engine`` with ``input_mode`` as mode 1."""
    if not delta2_resource > 0:
        raise DomainError("resource delta2 must be positive")
    m1 = input_mode
    m2 = engine.new_mode(delta2_resource, delta2_resource)
    m3 = engine.new_mode(delta2_resource, delta2_resource)
    for m in (m1, m2, m3):
        engine.apply_loss(m, loss.eta, origin="prep")
    engine.apply_loss(m3, loss.eta_g, origin="bs")
    engine.apply_loss(m1, loss.eta_g, origin="gate")
    engine.apply_loss(m2, loss.eta_g, origin="gate")
    engine.apply_cz(m1, m2)
    engine.apply_loss(m2, loss.eta_g, origin="gate")
    engine.apply_loss(m3, loss.eta_g, origin="gate")
    engine.apply_cz(m2, m3)
    p1 = engine.measure(m1, "p", loss.eta_m)
    p2 = engine.measure(m2, "p", loss.eta_m)
    engine.apply_amplifier(m3, gains.g)
    engine.apply_loss(m3, loss.eta_d, origin="disp")
    bin1 = engine.bin_correct(p1, abs(gains.g1), LATTICE, convention)
    bin2 = engine.bin_correct(p2, abs(gains.g2), LATTICE, convention)
    engine.apply_displacement(m3, "p", bin1.feedforward * _sign(gains.g1))
    engine.apply_displacement(m3, "q", bin2.feedforward * _sign(gains.g2))
    q_out = engine.quadrature(m3, "q")
    p_out = engine.quadrature(m3, "p")
    logger.info(
        "Process: teleport | Round: %d | Model: %s | V1=%.6g V2=%.6g",
        round_no,
        model,
        bin1.noise_variance,
        bin2.noise_variance,
    )
    return CircuitRun(
        engine=engine,
        model=model,
        round=round_no,
        loss=loss,
        gains=gains,
        delta2_input=delta2_input,
        delta2_resource=delta2_resource,
        modes=(m1, m2, m3),
        p1=p1,
        p2=p2,
        bin1=bin1,
        bin2=bin2,
        q_out=q_out,
        p_out=p_out,
        convention=convention,
    )


def build_report(run: CircuitRun) -> CircuitReport:
    engine = run.engine
    d_in = run.delta2_input if run.round == 1 else run.delta2_resource
    v_q_out = engine.variance_of(run.q_out)
    v_p_out = engine.variance_of(run.p_out)
    ladders = [
        run.bin1.ladder.to_record(run.bin1.err.name, "p"),
        run.bin2.ladder.to_record(run.bin2.err.name, "q"),
    ]
    # final readout of the output, one shift per quadrature
    read_q = Symbol("ErrShift", 0, run.output_mode, "readout_q")
    read_p = Symbol("ErrShift", 0, run.output_mode, "readout_p")
    read_ladders = {
        read_q: build_ladder(v_q_out, LATTICE.period, convention=run.convention),
        read_p: build_ladder(v_p_out, LATTICE.period, convention=run.convention),
    }
    all_ladders = {**engine.ladders, **read_ladders}
    q_disc = run.q_out.discrete_part()
    p_disc = run.p_out.discrete_part()
    return CircuitReport(
        model=run.model,
        round=run.round,
        delta2_input=run.delta2_input,
        delta2_resource=run.delta2_resource,
        loss=run.loss,
        v1=run.bin1.noise_variance,
        v2=run.bin2.noise_variance,
        v1_printed=printed_v1(d_in, run.delta2_resource, run.loss),
        v2_printed=printed_v2(d_in, run.delta2_resource, run.loss),
        gains=run.gains,
        q_out=run.q_out.to_record(),
        p_out=run.p_out.to_record(),
        v_q_out=v_q_out,
        v_p_out=v_p_out,
        ladders=ladders,
        readout_ladders=[
            read_ladders[read_q].to_record("readout_q", "q"),
            read_ladders[read_p].to_record("readout_p", "p"),
        ],
        logical=classify_logical(q_disc, p_disc, engine.ladders),
        logical_readout=classify_logical(
            q_disc + OperatorExpr.of(read_q), p_disc + OperatorExpr.of(read_p), all_ladders
        ),
    )


def iterate_runs(
    rounds: int,
    delta2: float,
    loss: Optional[LossConfig] = None,
    *,
    delta2_input: Optional[float] = None,
    gains: Optional[Gains] = None,
    model: Optional[Model] = None,
    convention: Optional[str] = None,
) -> list[CircuitRun]:
    """Chain ``rounds`` teleportations; each output is the next round's input.

    ``convention`` picks the error ladder bands, defaulting to the configured one.
    """
    if rounds < 1:
        raise DomainError("rounds must be >= 1")
    loss = loss or LossConfig()
    model = model or ("ideal" if loss.is_ideal else "lossy")
    gains = gains or balanced_gains(loss)
    d_in = delta2 if delta2_input is None else delta2_input
    if not d_in > 0:
        raise DomainError("input delta2 must be positive")
    engine = Engine()
    mode = engine.new_mode(d_in, d_in)
    runs = []
    for k in range(1, rounds + 1):
        run = teleport(
            engine,
            mode,
            delta2,
            loss,
            gains,
            model=model,
            round_no=k,
            delta2_input=d_in,
            convention=convention,
        )
        runs.append(run)
        mode = run.output_mode
    return runs


def iterate(
    rounds: int,
    delta2: float,
    loss: Optional[LossConfig] = None,
    *,
    delta2_input: Optional[float] = None,
    gains: Optional[Gains] = None,
) -> list[CircuitReport]:
    runs = iterate_runs(rounds, delta2, loss, delta2_input=delta2_input, gains=gains)
    return [build_report(run) for run in runs]


def run_ideal(delta2_input: float, delta2_resource: Optional[float] = None) -> CircuitReport:
    """Lossless circuit with unit feedforward gains."""
    d_res = delta2_input if delta2_resource is None else delta2_resource
    runs = iterate_runs(1, d_res, LossConfig(), delta2_input=delta2_input, model="ideal")
    return build_report(runs[0])


def run_lossy(
    delta2: float,
    loss: LossConfig,
    *,
    gains: Optional[Gains] = None,
    delta2_input: Optional[float] = None,
) -> CircuitReport:
    """Loss tolerant circuit; ``gains`` default to the balanced values."""
    runs = iterate_runs(1, delta2, loss, delta2_input=delta2_input, gains=gains, model="lossy")
    return build_report(runs[0])


def summary(report: CircuitReport) -> str:
    return render("circuit_summary", report=report)
