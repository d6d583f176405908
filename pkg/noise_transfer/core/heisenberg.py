"""Heisenberg-picture bookkeeping of quadrature operators.

Each live mode carries a pair ``(Q, P)`` of linear combinations of symbols:

* ``SignalQ``/``SignalP`` - the multi-valued signal of a prepared state,
* ``FlucQ``/``FlucP`` - its in-domain fluctuations,
* ``VacQ``/``VacP`` - vacuum entering through loss or amplification,
* ``MeasNoiseQ``/``MeasNoiseP`` - vacuum folded in by inefficient detectors,
* ``ErrShift`` - the discrete lattice mistake made by a binned feedforward.

Gaussian symbols are independent, so the variance of an expression is the
coefficient-weighted sum of their variances.  Signal and error symbols carry
no Gaussian variance; their statistics are handled by :mod:`.errors`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Literal, Mapping, Union

from .errors import ErrorLadder, build_ladder
from .exceptions import (
    ConsumedModeError,
    DomainError,
    UnbalancedCircuitError,
    UnboundSymbolError,
)
from .schema import DomainPartition, ExprRecord, Quadrature, TermRecord

logger = logging.getLogger(__name__)

__all__ = [
    "SYMBOL_KINDS",
    "Symbol",
    "OperatorExpr",
    "NoiseBindings",
    "BinResult",
    "Engine",
    "variance_of",
]

SymbolKind = Literal[
    "SignalQ",
    "SignalP",
    "FlucQ",
    "FlucP",
    "VacQ",
    "VacP",
    "MeasNoiseQ",
    "MeasNoiseP",
    "ErrShift",
]

# canonical print order
SYMBOL_KINDS: tuple[str, ...] = (
    "SignalQ",
    "SignalP",
    "FlucQ",
    "FlucP",
    "VacQ",
    "VacP",
    "MeasNoiseQ",
    "MeasNoiseP",
    "ErrShift",
)

SIGNAL_KINDS = frozenset({"SignalQ", "SignalP"})
DISCRETE_KINDS = frozenset({"SignalQ", "SignalP", "ErrShift"})
UNIT_KINDS = frozenset({"VacQ", "VacP", "MeasNoiseQ", "MeasNoiseP"})

_NAMES = {
    "SignalQ": "q_c{mode}",
    "SignalP": "p_c{mode}",
    "FlucQ": "dq{mode}",
    "FlucP": "dp{mode}",
    "VacQ": "q_v{id}",
    "VacP": "p_v{id}",
    "MeasNoiseQ": "dq_m{id}",
    "MeasNoiseP": "dp_m{id}",
    "ErrShift": "e{id}",
}

# coefficients smaller than this are treated as exact cancellations
ZERO_TOL = 1e-13


@dataclass(frozen=True)
class Symbol:
    """Operator symbol; ``mode`` is the rail it entered on, ``origin`` the element."""

    kind: SymbolKind
    id: int
    mode: int
    origin: str = "prep"

    @property
    def name(self) -> str:
        return _NAMES[self.kind].format(mode=self.mode, id=self.id)

    @property
    def sort_key(self) -> tuple[int, int, int]:
        return SYMBOL_KINDS.index(self.kind), self.mode, self.id

    @property
    def is_noise(self) -> bool:
        return self.kind not in DISCRETE_KINDS

    def __str__(self) -> str:
        return self.name


Scalar = Union[int, float]


@dataclass
class OperatorExpr:
    """Linear combination of symbols plus a constant."""

    terms: Dict[Symbol, float] = field(default_factory=dict)
    constant: float = 0.0

    def __post_init__(self) -> None:
        clean = {}
        for sym, coeff in self.terms.items():
            coeff = float(coeff)
            if not math.isfinite(coeff):
                raise DomainError(f"non-finite coefficient on {sym}")
            if abs(coeff) > ZERO_TOL:
                clean[sym] = coeff
        self.terms = clean
        self.constant = float(self.constant)

    @classmethod
    def of(cls, sym: Symbol, coeff: float = 1.0) -> "OperatorExpr":
        return cls({sym: coeff})

    def __add__(self, other: Union["OperatorExpr", Scalar]) -> "OperatorExpr":
        if not isinstance(other, OperatorExpr):
            return OperatorExpr(dict(self.terms), self.constant + float(other))
        terms = dict(self.terms)
        for sym, coeff in other.terms.items():
            terms[sym] = terms.get(sym, 0.0) + coeff
        return OperatorExpr(terms, self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self) -> "OperatorExpr":
        return self * -1.0

    def __sub__(self, other: Union["OperatorExpr", Scalar]) -> "OperatorExpr":
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "OperatorExpr":
        return (-self) + other

    def __mul__(self, factor: Scalar) -> "OperatorExpr":
        factor = float(factor)
        return OperatorExpr({s: c * factor for s, c in self.terms.items()}, self.constant * factor)

    __rmul__ = __mul__

    def coeff(self, sym: Symbol) -> float:
        return self.terms.get(sym, 0.0)

    def symbols(self) -> list[Symbol]:
        return sorted(self.terms, key=lambda s: s.sort_key)

    def select(self, kinds: Iterable[str]) -> "OperatorExpr":
        kinds = set(kinds)
        return OperatorExpr({s: c for s, c in self.terms.items() if s.kind in kinds})

    def noise_part(self) -> "OperatorExpr":
        return OperatorExpr({s: c for s, c in self.terms.items() if s.is_noise})

    def discrete_part(self) -> "OperatorExpr":
        return OperatorExpr(
            {s: c for s, c in self.terms.items() if not s.is_noise}, self.constant
        )

    def by_name(self) -> dict[str, float]:
        return {s.name: c for s, c in self.terms.items()}

    def isclose(self, other: "OperatorExpr", tol: float = 1e-12) -> bool:
        diff = self - other
        return abs(diff.constant) <= tol and all(abs(c) <= tol for c in diff.terms.values())

    def evaluate(self, values: Mapping[Symbol, float]) -> float:
        return self.constant + sum(c * values[s] for s, c in self.terms.items())

    def pretty(self) -> str:
        """Canonically ordered text form, e.g. ``dq3 - p_c2 - q_c1 - e2``."""
        parts: list[str] = []
        for sym in self.symbols():
            coeff = self.terms[sym]
            mag = abs(coeff)
            body = sym.name if abs(mag - 1) < 1e-12 else f"{mag:.6g}*{sym.name}"
            sign = "-" if coeff < 0 else "+"
            parts.append(f"{sign} {body}" if parts else (f"-{body}" if coeff < 0 else body))
        if self.constant or not parts:
            c = self.constant
            if parts:
                parts.append(f"{'-' if c < 0 else '+'} {abs(c):.6g}")
            else:
                parts.append(f"{c:.6g}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.pretty()

    def to_record(self) -> ExprRecord:
        return ExprRecord(
            terms=[
                TermRecord(
                    symbol=s.name,
                    kind=s.kind,
                    id=s.id,
                    mode=s.mode,
                    origin=s.origin,
                    coeff=self.terms[s],
                )
                for s in self.symbols()
            ],
            constant=self.constant,
            text=self.pretty(),
        )

    @classmethod
    def from_record(cls, record: ExprRecord) -> "OperatorExpr":
        return cls(
            {Symbol(t.kind, t.id, t.mode, t.origin): t.coeff for t in record.terms},
            record.constant,
        )


class NoiseBindings:
    """Variances of the Gaussian symbols; vacuum-like symbols default to 1."""

    def __init__(self) -> None:
        self._values: Dict[Symbol, float] = {}

    def bind(self, sym: Symbol, variance: float) -> None:
        if not variance >= 0 or not math.isfinite(variance):
            raise DomainError(f"variance of {sym} must be finite and >= 0")
        self._values[sym] = float(variance)

    def variance(self, sym: Symbol) -> float:
        if not sym.is_noise:
            return 0.0
        if sym in self._values:
            return self._values[sym]
        if sym.kind in UNIT_KINDS:
            return 1.0
        raise UnboundSymbolError(f"no variance bound for {sym}")

    def __contains__(self, sym: Symbol) -> bool:
        return sym in self._values or sym.kind in UNIT_KINDS

    def to_dict(self) -> dict[str, float]:
        return {s.name: v for s, v in sorted(self._values.items(), key=lambda kv: kv[0].sort_key)}


def variance_of(expr: OperatorExpr, bindings: NoiseBindings) -> float:
    """Variance of the Gaussian part of ``expr``."""
    return float(sum(c * c * bindings.variance(s) for s, c in expr.terms.items() if s.is_noise))


@dataclass(frozen=True)
class BinResult:
    """Outcome of binning a measured quadrature.

    ``signal`` is the lattice-valued part recovered exactly, ``err`` the
    fresh shift symbol; the value fed forward is ``signal + err`` in units
    of the rescaled measurement.
    """

    signal: OperatorExpr
    err: Symbol
    noise_variance: float
    ladder: ErrorLadder
    rescale: float
    measured: OperatorExpr

    @property
    def feedforward(self) -> OperatorExpr:
        return self.signal + OperatorExpr.of(self.err)


class Engine:
    """Mutable circuit state: live modes, bindings, ladders and an element log."""

    def __init__(self) -> None:
        self.modes: Dict[int, tuple[OperatorExpr, OperatorExpr]] = {}
        self.consumed: set[int] = set()
        self.bindings = NoiseBindings()
        self.ladders: Dict[Symbol, ErrorLadder] = {}
        self.bins: list[BinResult] = []
        self.log: list[str] = []
        self._next_mode = 1
        self._next_vac = 1
        self._next_meas = 1
        self._next_err = 1

    # -- helpers ---------------------------------------------------------
    def _record(self, entry: str) -> None:
        self.log.append(entry)
        logger.debug("engine: %s", entry)

    def _live(self, mode: int) -> tuple[OperatorExpr, OperatorExpr]:
        if mode in self.consumed:
            raise ConsumedModeError(f"mode {mode} was already measured")
        if mode not in self.modes:
            raise ConsumedModeError(f"mode {mode} does not exist")
        return self.modes[mode]

    def _vacuum_pair(self, mode: int, origin: str) -> tuple[OperatorExpr, OperatorExpr]:
        vid = self._next_vac
        self._next_vac += 1
        return (
            OperatorExpr.of(Symbol("VacQ", vid, mode, origin)),
            OperatorExpr.of(Symbol("VacP", vid, mode, origin)),
        )

    def quadrature(self, mode: int, quadrature: Quadrature) -> OperatorExpr:
        q, p = self._live(mode)
        return q if quadrature == "q" else p

    # -- elements --------------------------------------------------------
    def new_mode(self, v_q: float, v_p: float) -> int:
        """Register a prepared mode with fluctuation variances ``v_q`` and ``v_p``."""
        if v_q < 0 or v_p < 0:
            raise DomainError("fluctuation variances must be >= 0")
        mode = self._next_mode
        self._next_mode += 1
        fq = Symbol("FlucQ", mode, mode)
        fp = Symbol("FlucP", mode, mode)
        self.bindings.bind(fq, v_q)
        self.bindings.bind(fp, v_p)
        q = OperatorExpr({Symbol("SignalQ", mode, mode): 1.0, fq: 1.0})
        p = OperatorExpr({Symbol("SignalP", mode, mode): 1.0, fp: 1.0})
        self.modes[mode] = (q, p)
        self._record(f"new_mode({mode}, V_q={v_q:g}, V_p={v_p:g})")
        return mode

    def apply_loss(self, mode: int, eta: float, origin: str = "bs") -> None:
        """Beamsplitter of transmission ``eta`` with a vacuum in the other port."""
        if not 0 <= eta <= 1:
            raise DomainError(f"transmission must lie in [0, 1], got {eta}")
        q, p = self._live(mode)
        if eta == 1:
            return
        vq, vp = self._vacuum_pair(mode, origin)
        t, r = math.sqrt(eta), math.sqrt(1 - eta)
        self.modes[mode] = (q * t + vq * r, p * t + vp * r)
        self._record(f"loss({mode}, eta={eta:g}, origin={origin})")

    def apply_cz(self, a: int, b: int) -> None:
        if a == b:
            raise DomainError("CZ needs two distinct modes")
        qa, pa = self._live(a)
        qb, pb = self._live(b)
        self.modes[a] = (qa, pa + qb)
        self.modes[b] = (qb, pb + qa)
        self._record(f"cz({a}, {b})")

    def apply_amplifier(self, mode: int, gain: float, origin: str = "amp") -> None:
        """Phase-insensitive amplifier; the idler enters P with a minus sign."""
        if not gain >= 1:
            raise DomainError(f"amplifier gain must be >= 1, got {gain}")
        q, p = self._live(mode)
        if gain == 1:
            return
        vq, vp = self._vacuum_pair(mode, origin)
        extra = math.sqrt(gain * gain - 1)
        self.modes[mode] = (q * gain + vq * extra, p * gain - vp * extra)
        self._record(f"amplifier({mode}, g={gain:g})")

    def apply_rotation90(self, mode: int) -> None:
        q, p = self._live(mode)
        self.modes[mode] = (p, -q)
        self._record(f"rotate90({mode})")

    def apply_displacement(
        self, mode: int, quadrature: Quadrature, value: Union[OperatorExpr, Scalar]
    ) -> None:
        q, p = self._live(mode)
        if quadrature == "q":
            self.modes[mode] = (q + value, p)
        else:
            self.modes[mode] = (q, p + value)
        self._record(f"displace({mode}, {quadrature}, {value})")

    def measure(self, mode: int, quadrature: Quadrature, efficiency: float = 1.0) -> OperatorExpr:
        """Homodyne measurement; the mode is consumed.

        An efficiency below one mixes in detector vacuum before readout.
        """
        if not 0 < efficiency <= 1:
            raise DomainError(f"detector efficiency must lie in (0, 1], got {efficiency}")
        expr = self.quadrature(mode, quadrature)
        if efficiency < 1:
            kind = "MeasNoiseQ" if quadrature == "q" else "MeasNoiseP"
            noise = Symbol(kind, self._next_meas, mode, "det")
            self._next_meas += 1
            expr = expr * math.sqrt(efficiency) + OperatorExpr.of(noise, math.sqrt(1 - efficiency))
        self.consumed.add(mode)
        del self.modes[mode]
        self._record(f"measure({mode}, {quadrature}, eff={efficiency:g})")
        return expr

    # -- analysis --------------------------------------------------------
    def variance_of(self, expr: OperatorExpr) -> float:
        return variance_of(expr, self.bindings)

    def bin_correct(
        self,
        expr: OperatorExpr,
        rescale: float,
        lattice: DomainPartition,
        convention: str | None = None,
    ) -> BinResult:
        """Round a measured quadrature onto the lattice.

        After scaling by ``rescale`` every signal and earlier shift symbol
        must carry an integer coefficient; otherwise the outcome mixes
        lattice points and cannot be binned.
        """
        if lattice.kind != "lattice":
            raise DomainError("binning needs a lattice partition")
        scaled = expr * rescale
        signal_terms = {}
        for sym, coeff in scaled.discrete_part().terms.items():
            rounded = round(coeff)
            if abs(coeff - rounded) > 1e-9:
                raise UnbalancedCircuitError(
                    f"{sym.name} enters the measurement with coefficient {coeff:.12g}"
                )
            signal_terms[sym] = float(rounded)
        signal = OperatorExpr(signal_terms, scaled.constant)
        noise_variance = self.variance_of(scaled.noise_part())
        err = Symbol("ErrShift", self._next_err, 0, "ff")
        self._next_err += 1
        ladder = build_ladder(noise_variance, lattice.period, convention=convention)
        self.ladders[err] = ladder
        result = BinResult(signal, err, noise_variance, ladder, rescale, expr)
        self.bins.append(result)
        self._record(f"bin({signal} -> {err.name}, V={noise_variance:.6g})")
        return result

    def symplectic_form(self, mode: int) -> float:
        """``[Q, P]`` of ``mode`` in units of the vacuum commutator.

        Signal and fluctuation symbols of a mode share the commutator of the
        prepared state, which is carried by the fluctuation pair.
        """
        q, p = self._live(mode)
        pairs = {"FlucQ": "FlucP", "VacQ": "VacP"}
        keys = {
            (kind, s.id, s.mode, s.origin)
            for s in (*q.terms, *p.terms)
            for kind, partner in pairs.items()
            if s.kind in (kind, partner)
        }
        total = 0.0
        for kind, sid, smode, origin in keys:
            x = Symbol(kind, sid, smode, origin)
            y = Symbol(pairs[kind], sid, smode, origin)
            total += q.coeff(x) * p.coeff(y) - q.coeff(y) * p.coeff(x)
        return total

    def snapshot(self) -> dict:
        """JSON-ready view of live modes, bindings and the element log."""
        return {
            "modes": {
                str(m): {"q": q.to_record().model_dump(), "p": p.to_record().model_dump()}
                for m, (q, p) in sorted(self.modes.items())
            },
            "consumed": sorted(self.consumed),
            "bindings": self.bindings.to_dict(),
            "log": list(self.log),
        }
