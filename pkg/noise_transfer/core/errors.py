"""Confinement probabilities, shift ladders and logical error classification.

A binned measurement with Gaussian noise of variance ``V`` on a lattice of
period ``D`` lands ``n`` sites away from the intended one with probability
``probs[n]``; ``probs[n]`` for ``n >= 1`` is the combined weight of ``+n``
and ``-n``.  Odd shifts flip the logical value.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping

import numpy as np
from scipy.special import erf, erfc

from .config import ladder_convention, numeric_setting
from .exceptions import DomainError, UnboundSymbolError
from .schema import LadderRecord, LogicalErrorReport, Quadrature

logger = logging.getLogger(__name__)

__all__ = [
    "ErrorLadder",
    "confinement_probability",
    "build_ladder",
    "classify_logical",
    "classify_by_enumeration",
]

Convention = Literal["printed", "centred"]


@dataclass(frozen=True)
class ErrorLadder:
    period: float
    variance: float
    probs: np.ndarray
    convention: Convention = "printed"

    @property
    def p_odd(self) -> float:
        return float(self.probs[1::2].sum())

    @property
    def p_even(self) -> float:
        return float(self.probs[0::2].sum())

    def signed(self) -> tuple[np.ndarray, np.ndarray]:
        """Shifts ``-n..n`` with the combined weights split evenly by sign."""
        n = len(self.probs) - 1
        shifts = np.arange(-n, n + 1)
        weights = np.concatenate([self.probs[:0:-1] / 2, self.probs[:1], self.probs[1:] / 2])
        return shifts, weights

    def to_record(self, symbol: str, quadrature: Quadrature) -> LadderRecord:
        return LadderRecord(
            symbol=symbol,
            quadrature=quadrature,
            period=self.period,
            variance=self.variance,
            convention=self.convention,
            probs=self.probs.tolist(),
        )


def confinement_probability(variance: float, period: float) -> float:
    """Probability that the noise keeps a sample inside its own domain."""
    if variance < 0 or not period > 0:
        raise DomainError("variance must be >= 0 and period > 0")
    if variance == 0:
        return 1.0
    return float(erf(period / (2 * math.sqrt(2 * variance))))


def _band_edges(n: np.ndarray, convention: Convention) -> tuple[np.ndarray, np.ndarray]:
    # edges in units of D/2: printed bands [n, n+1], centred bands [2n-1, 2n+1]
    if convention == "printed":
        return n.astype(float), n + 1.0
    lower = np.where(n == 0, 0.0, 2.0 * n - 1.0)
    return lower, 2.0 * n + 1.0


def build_ladder(
    variance: float,
    period: float,
    n_max: int | None = None,
    convention: Convention | None = None,
) -> ErrorLadder:
    """Tabulate ``probs[n]`` up to ``n_max`` (chosen from the tail cutoff if omitted)."""
    convention = convention or ladder_convention()
    if convention not in ("printed", "centred"):
        raise DomainError(f"Unknown ladder convention: {convention}")
    if variance < 0 or not period > 0:
        raise DomainError("variance must be >= 0 and period > 0")
    if variance == 0:
        return ErrorLadder(period, 0.0, np.array([1.0]), convention)
    scale = period / (2 * math.sqrt(2 * variance))
    if n_max is None:
        tail = numeric_setting("ladder_tail")
        n_max = 0
        while erfc(_band_edges(np.array([n_max]), convention)[1][0] * scale) >= tail:
            n_max += 1
            if n_max > 100_000:
                raise DomainError(f"variance {variance} is too large for period {period}")
    n = np.arange(n_max + 1)
    lower, upper = _band_edges(n, convention)
    probs = erfc(lower * scale) - erfc(upper * scale)
    probs = probs / probs.sum()
    logger.debug(
        "build_ladder: V=%.6g D=%.6g n_max=%d P0=%.15g convention=%s",
        variance,
        period,
        n_max,
        probs[0],
        convention,
    )
    return ErrorLadder(period, float(variance), probs, convention)


def _shift_coefficients(expr, ladders: Mapping) -> list[tuple[object, int]]:
    """ErrShift symbols of ``expr`` with their integer coefficients."""
    out = []
    for sym, coeff in expr.terms.items():
        if sym.kind != "ErrShift":
            continue
        if sym not in ladders:
            raise UnboundSymbolError(f"no ladder for {sym}")
        rounded = round(coeff)
        if abs(coeff - rounded) > 1e-9:
            raise DomainError(f"shift {sym} enters with non-integer coefficient {coeff}")
        out.append((sym, int(rounded)))
    return out


def classify_logical(q_expr, p_expr, ladders: Mapping) -> LogicalErrorReport:
    """Probabilities of bit and phase flips of the output.

    Each ladder is one independent shift; its parity, weighted by the
    coefficient it carries in the q and p output expressions, is convolved
    over the four logical classes.
    """
    q_coeffs = dict(_shift_coefficients(q_expr, ladders))
    p_coeffs = dict(_shift_coefficients(p_expr, ladders))
    dist = np.zeros((2, 2))
    dist[0, 0] = 1.0
    for sym in sorted(set(q_coeffs) | set(p_coeffs), key=lambda s: s.sort_key):
        flip = (q_coeffs.get(sym, 0) % 2, p_coeffs.get(sym, 0) % 2)
        if flip == (0, 0):
            continue
        p_odd = ladders[sym].p_odd
        moved = np.roll(np.roll(dist, flip[0], axis=0), flip[1], axis=1)
        dist = (1 - p_odd) * dist + p_odd * moved
    return _report(dist)


def _report(dist: np.ndarray) -> LogicalErrorReport:
    dist = dist / dist.sum()
    return LogicalErrorReport(
        p_none=float(dist[0, 0]),
        p_bit_flip=float(dist[1, 0]),
        p_phase_flip=float(dist[0, 1]),
        p_both=float(dist[1, 1]),
    )


def classify_by_enumeration(
    q_expr, p_expr, ladders: Mapping, cutoff: float = 1e-15
) -> LogicalErrorReport:
    """Reference classification summing every signed shift tuple explicitly."""
    q_coeffs = dict(_shift_coefficients(q_expr, ladders))
    p_coeffs = dict(_shift_coefficients(p_expr, ladders))
    symbols = sorted(set(q_coeffs) | set(p_coeffs), key=lambda s: s.sort_key)
    tables: list[Iterable[tuple[int, float]]] = []
    for sym in symbols:
        shifts, weights = ladders[sym].signed()
        tables.append([(int(s), float(w)) for s, w in zip(shifts, weights) if w > cutoff])
    dist = np.zeros((2, 2))
    for combo in itertools.product(*tables):
        weight = math.prod(w for _, w in combo)
        q_shift = sum(q_coeffs.get(sym, 0) * s for sym, (s, _) in zip(symbols, combo))
        p_shift = sum(p_coeffs.get(sym, 0) * s for sym, (s, _) in zip(symbols, combo))
        dist[q_shift % 2, p_shift % 2] += weight
    return _report(dist)
