"""Pydantic models for the records this package reads and writes.

These models define the JSON files produced by the CLI and the value types
passed between the numerical modules.  Range checks live in validators so
an out-of-range state or channel is rejected the moment it is built.
"""

from __future__ import annotations

import math
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Quadrature = Literal["q", "p"]

HALF_PI = math.pi / 2


class StateModel(BaseModel):
    """Parametric single-mode state.

    ``rotation`` is either 0 or pi/2; the latter swaps the roles of the
    quadratures (logical Hadamard for GKP states).
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["vacuum", "coherent", "squeezed", "cat", "gkp"]
    alpha: float = 0.0
    delta2: Optional[float] = None
    mu: int = 0
    rotation: float = 0.0

    @field_validator("rotation")
    def check_rotation(cls, v: float) -> float:
        if abs(v) < 1e-12:
            return 0.0
        if abs(v - HALF_PI) < 1e-12:
            return HALF_PI
        raise ValueError("rotation must be 0 or pi/2")

    @model_validator(mode="after")
    def check_parameters(self) -> "StateModel":
        if not math.isfinite(self.alpha):
            raise ValueError("alpha must be finite")
        if self.kind == "cat" and self.alpha < 0:
            raise ValueError("cat amplitude alpha must be >= 0")
        if self.kind == "squeezed":
            if self.delta2 is None or not 0 < self.delta2 <= 1:
                raise ValueError("squeezed variance delta2 must lie in (0, 1]")
        if self.kind == "gkp":
            if self.delta2 is None or not 0 < self.delta2 < 1:
                raise ValueError("GKP delta2 must lie in (0, 1)")
            if self.mu not in (0, 1):
                raise ValueError("GKP logical value mu must be 0 or 1")
        return self

    @property
    def rotated(self) -> bool:
        return self.rotation != 0.0

    def label(self) -> str:
        """Short human readable name, e.g. ``gkp+`` or ``cat(2)``."""
        match self.kind:
            case "gkp":
                if self.rotated:
                    return "gkp+" if self.mu == 0 else "gkp-"
                return f"gkp{self.mu}"
            case "cat" | "coherent":
                return f"{self.kind}({self.alpha:g})"
            case "squeezed":
                return f"squeezed({self.delta2:g})"
            case _:
                return self.kind


class DomainPartition(BaseModel):
    """Rule mapping a quadrature value to a domain index."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["lattice", "sign", "explicit"]
    period: Optional[float] = None
    offset: float = 0.0
    boundaries: tuple[float, ...] = ()

    @model_validator(mode="after")
    def check_layout(self) -> "DomainPartition":
        if self.kind == "lattice":
            if self.period is None or not self.period > 0 or not math.isfinite(self.period):
                raise ValueError("lattice period must be a positive finite number")
        if self.kind == "explicit":
            b = self.boundaries
            if any(not math.isfinite(x) for x in b):
                raise ValueError("boundaries must be finite")
            if any(b2 <= b1 for b1, b2 in zip(b, b[1:])):
                raise ValueError("boundaries must be strictly increasing")
        return self


class DomainRecord(BaseModel):
    n: int
    mean: float
    prob: float


class DomainStats(BaseModel):
    """Per-domain means and probabilities plus the aggregate variance."""

    quadrature: Quadrature
    domains: List[DomainRecord] = Field(default_factory=list)
    variance: float = 0.0
    second_moment: float = 0.0
    mean: float = 0.0
    clipped_fraction: float = 0.0
    dropped_mass: float = 0.0

    def signal_second_moment(self) -> float:
        """Return ``sum_n q_n^2 P_n``."""
        return sum(d.mean**2 * d.prob for d in self.domains)


class PeakSeparation(BaseModel):
    """Momentum fringe width of a cat state measured in units of its noise."""

    alpha: float
    period: float
    variance: float
    ratio: float
    advisory: bool = False


class TermRecord(BaseModel):
    symbol: str
    kind: str
    id: int
    mode: int
    origin: str
    coeff: float


class ExprRecord(BaseModel):
    terms: List[TermRecord] = Field(default_factory=list)
    constant: float = 0.0
    text: str = ""


class LadderRecord(BaseModel):
    symbol: str
    quadrature: Quadrature
    period: float
    variance: float
    convention: Literal["printed", "centred"] = "printed"
    probs: List[float] = Field(default_factory=list)


class LogicalErrorReport(BaseModel):
    p_bit_flip: float = 0.0
    p_phase_flip: float = 0.0
    p_both: float = 0.0
    p_none: float = 1.0

    @model_validator(mode="after")
    def check_total(self) -> "LogicalErrorReport":
        values = (self.p_bit_flip, self.p_phase_flip, self.p_both, self.p_none)
        if any(v < -1e-15 or v > 1 + 1e-15 for v in values):
            raise ValueError("probabilities must lie in [0, 1]")
        if abs(sum(values) - 1.0) > 1e-12:
            raise ValueError("logical error probabilities must sum to 1")
        return self

    def as_dict(self) -> Dict[str, float]:
        return {
            "none": self.p_none,
            "bit": self.p_bit_flip,
            "phase": self.p_phase_flip,
            "both": self.p_both,
        }


class LossConfig(BaseModel):
    """Component efficiencies of the loss tolerant circuit."""

    model_config = ConfigDict(frozen=True)

    eta: float = 1.0
    eta_g: float = 1.0
    eta_m: float = 1.0
    eta_d: float = 1.0

    @field_validator("eta", "eta_g", "eta_m", "eta_d")
    def check_efficiency(cls, v: float) -> float:
        if not 0 < v <= 1:
            raise ValueError("efficiencies must lie in (0, 1]")
        return v

    @property
    def is_ideal(self) -> bool:
        return self.eta == self.eta_g == self.eta_m == self.eta_d == 1.0


class Gains(BaseModel):
    g1: float = -1.0
    g2: float = -1.0
    g: float = 1.0


class CircuitReport(BaseModel):
    model: Literal["ideal", "lossy"]
    round: int = 1
    delta2_input: float
    delta2_resource: float
    loss: LossConfig = Field(default_factory=LossConfig)
    v1: float
    v2: float
    v1_printed: float
    v2_printed: float
    gains: Gains = Field(default_factory=Gains)
    q_out: ExprRecord
    p_out: ExprRecord
    v_q_out: float
    v_p_out: float
    ladders: List[LadderRecord] = Field(default_factory=list)
    readout_ladders: List[LadderRecord] = Field(default_factory=list)
    logical: LogicalErrorReport = Field(default_factory=LogicalErrorReport)
    logical_readout: Optional[LogicalErrorReport] = None


class TrialConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    trials: int
    seed: int = 0
    model: Literal["ideal", "lossy"] = "ideal"
    loss: LossConfig = Field(default_factory=LossConfig)
    delta2: float = 0.1
    mu: int = 0
    spike_model: Literal["gaussian", "exact"] = "gaussian"
    noisy_readout: bool = False
    rounds: int = 1

    @field_validator("trials")
    def check_trials(cls, v: int) -> int:
        if v < 1:
            raise ValueError("trials must be >= 1")
        return v

    @field_validator("seed")
    def check_seed(cls, v: int) -> int:
        if not 0 <= v < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return v

    @field_validator("delta2")
    def check_delta2(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError("delta2 must lie in (0, 1)")
        return v

    @field_validator("mu")
    def check_mu(cls, v: int) -> int:
        if v not in (0, 1):
            raise ValueError("mu must be 0 or 1")
        return v

    @field_validator("rounds")
    def check_rounds(cls, v: int) -> int:
        if v < 1:
            raise ValueError("rounds must be >= 1")
        return v


class TrialOutcome(BaseModel):
    config: TrialConfig
    counts: Dict[str, int] = Field(
        default_factory=lambda: {"none": 0, "bit": 0, "phase": 0, "both": 0}
    )

    @property
    def trials(self) -> int:
        return sum(self.counts.values())

    def rates(self) -> Dict[str, float]:
        n = self.trials
        return {k: (v / n if n else 0.0) for k, v in self.counts.items()}

    def standard_errors(self) -> Dict[str, float]:
        n = self.trials
        return {
            k: (math.sqrt(r * (1 - r) / n) if n else 0.0) for k, r in self.rates().items()
        }


class Comparison(BaseModel):
    passed: bool
    threshold: float
    z: Dict[str, float] = Field(default_factory=dict)
    predicted: Dict[str, float] = Field(default_factory=dict)
    observed: Dict[str, float] = Field(default_factory=dict)


class ChannelSpec(BaseModel):
    """Single-mode Gaussian channel acting on a quadrature marginal."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["loss", "amp"]
    value: float

    @model_validator(mode="after")
    def check_value(self) -> "ChannelSpec":
        if self.kind == "loss" and not 0 < self.value <= 1:
            raise ValueError("loss transmission must lie in (0, 1]")
        if self.kind == "amp" and not self.value >= 1:
            raise ValueError("amplifier gain must be >= 1")
        return self

    @property
    def scale(self) -> float:
        return math.sqrt(self.value) if self.kind == "loss" else self.value

    @property
    def added_variance(self) -> float:
        return 1 - self.value if self.kind == "loss" else self.value**2 - 1

    def label(self) -> str:
        return f"{self.kind}({self.value:g})"


class ValidationSummary(BaseModel):
    state: str
    quadrature: Quadrature
    channel: str
    oracle_v: float
    formula_v: float
    rel_err: float
    clipped_fraction: float
    regime: Literal["localized", "clipped"]
    second_moment_oracle: float
    second_moment_formula: float


class RunConfig(BaseModel):
    """Flags of one CLI invocation; stored next to its outputs."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    command: Literal["state-stats", "sweep", "circuit", "mc", "loss-oracle"]
    state: Optional[str] = None
    states: Optional[List[str]] = None
    alpha: Optional[float] = None
    mu: Optional[int] = None
    delta2: Optional[float] = None
    rotated: bool = False
    quadrature: Quadrature = "q"
    domains: str = "auto"
    out: Literal["csv", "json"] = "json"
    path: Optional[str] = None
    param: Optional[Literal["alpha", "delta2"]] = None
    start: Optional[float] = Field(default=None, alias="from")
    stop: Optional[float] = Field(default=None, alias="to")
    steps: Optional[int] = None
    model: Literal["ideal", "lossy"] = "ideal"
    eta: float = 1.0
    eta_g: float = 1.0
    eta_m: float = 1.0
    eta_d: float = 1.0
    rounds: int = 1
    trials: Optional[int] = None
    seed: int = 0
    spike_model: Literal["gaussian", "exact"] = "gaussian"
    noisy_readout: bool = False
    channel: Literal["loss", "amp"] = "loss"
    gain: Optional[float] = None
