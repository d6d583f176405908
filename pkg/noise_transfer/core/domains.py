"""Domain partitions and per-domain statistics.

For a partition of the real line into domains ``n`` the module computes

    P_n  = int_n |Psi|^2,
    x_n  = int_n x |Psi|^2 / P_n,
    V    = <x^2> - sum_n x_n^2 P_n,

i.e. the average in-domain variance around the domain means.  A partition
with a single domain gives back the ordinary variance.
"""

from __future__ import annotations

import bisect
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad, quad_vec

from .config import numeric_setting
from .exceptions import DomainError, NumericError
from .schema import (
    DomainPartition,
    DomainRecord,
    DomainStats,
    PeakSeparation,
    Quadrature,
    StateModel,
)
from .states import (
    DensityGrid,
    cat,
    coherent,
    default_partition,
    density,
    gkp,
    squeezed,
    support,
    vacuum,
)

logger = logging.getLogger(__name__)

__all__ = [
    "FAMILIES",
    "lattice",
    "sign_split",
    "explicit",
    "scale_partition",
    "domain_index",
    "domain_intervals",
    "domain_stats",
    "grid_stats",
    "family_state",
    "sweep_variance",
    "sweep_rows",
    "peak_separation",
    "peak_separation_ratio",
]

FAMILIES = ("cat", "coherent", "squeezed", "vacuum", "gkp0", "gkp1", "gkp+", "gkp-")


def lattice(period: float, offset: float = 0.0) -> DomainPartition:
    return DomainPartition(kind="lattice", period=period, offset=offset)


def sign_split() -> DomainPartition:
    return DomainPartition(kind="sign")


def explicit(boundaries: Sequence[float]) -> DomainPartition:
    return DomainPartition(kind="explicit", boundaries=tuple(boundaries))


def scale_partition(part: DomainPartition, factor: float) -> DomainPartition:
    """Return ``part`` with every boundary multiplied by ``factor`` (> 0)."""
    if not factor > 0:
        raise DomainError("scale factor must be positive")
    match part.kind:
        case "lattice":
            return lattice(part.period * factor, part.offset * factor)
        case "explicit":
            return explicit([b * factor for b in part.boundaries])
    return part


def domain_index(part: DomainPartition, x: float) -> int:
    """Index of the domain containing ``x``; boundary points go right."""
    match part.kind:
        case "lattice":
            return int(math.floor((x - part.offset) / part.period + 0.5))
        case "sign":
            return 1 if x < 0 else 2
        case _:
            return bisect.bisect_right(part.boundaries, x)


def _boundaries_in(part: DomainPartition, lo: float, hi: float) -> list[float]:
    match part.kind:
        case "lattice":
            first = domain_index(part, lo)
            last = domain_index(part, hi)
            edges = [part.offset + (n + 0.5) * part.period for n in range(first, last)]
        case "sign":
            edges = [0.0]
        case _:
            edges = list(part.boundaries)
    return [b for b in edges if lo < b < hi]


def _clip_halfwidth(part: DomainPartition) -> float:
    """Half-width of the clipping window centred on each boundary.

    "Within D/4 of a boundary" is read as a window of total width D/4,
    i.e. D/8 either side, so a lattice window covers a quarter of a
    domain.
    """
    match part.kind:
        case "lattice":
            return part.period / 8
        case "sign":
            return 0.25
        case _:
            gaps = np.diff(part.boundaries)
            return float(gaps.min()) / 8 if len(gaps) else 0.25


def domain_intervals(part: DomainPartition, lo: float, hi: float) -> list[tuple[int, float, float]]:
    """Split ``[lo, hi]`` into ``(n, a, b)`` pieces, one per domain."""
    edges = [lo, *_boundaries_in(part, lo, hi), hi]
    return [(domain_index(part, 0.5 * (a + b)), a, b) for a, b in zip(edges, edges[1:])]


def _assemble(
    quadrature: Quadrature,
    raw: Iterable[tuple[int, float, float, float]],
    clipped: float,
) -> DomainStats:
    raw = list(raw)
    total = sum(m0 for _, m0, _, _ in raw)
    if not math.isfinite(total) or total <= 0:
        raise NumericError(f"density is not normalisable (total mass {total})")
    if abs(total - 1.0) > 1e-6:
        raise NumericError(f"density integrates to {total}, expected 1")
    drop = numeric_setting("drop_probability")
    kept = [r for r in raw if r[1] / total >= drop]
    dropped = sum(r[1] for r in raw) - sum(r[1] for r in kept)
    norm = sum(r[1] for r in kept)
    records = [DomainRecord(n=n, mean=m1 / m0, prob=m0 / norm) for n, m0, m1, _ in kept]
    second = sum(m2 for _, _, _, m2 in kept) / norm
    mean = sum(m1 for _, _, m1, _ in kept) / norm
    variance = second - sum(r.mean**2 * r.prob for r in records)
    if variance < 0:
        # rounding residue of a point-like density
        variance = 0.0 if variance > -1e-12 * max(second, 1.0) else variance
    if variance < 0:
        raise NumericError(f"negative domain variance {variance}")
    return DomainStats(
        quadrature=quadrature,
        domains=records,
        variance=variance,
        second_moment=second,
        mean=mean,
        clipped_fraction=min(max(clipped / total, 0.0), 1.0),
        dropped_mass=dropped / total,
    )


def _integrate_moments(rho: Callable[[float], float], a: float, b: float) -> tuple[float, float, float]:
    epsrel = numeric_setting("integration_epsrel")

    def f(x: float) -> np.ndarray:
        r = float(rho(x))
        return np.array([r, x * r, x * x * r])

    value, _err = quad_vec(f, a, b, epsrel=epsrel, epsabs=1e-15)
    return float(value[0]), float(value[1]), float(value[2])


def domain_stats(state: StateModel, quadrature: Quadrature, part: DomainPartition | None = None) -> DomainStats:
    """Per-domain means, probabilities and the aggregate variance of ``state``."""
    part = part or default_partition(state, quadrature)
    lo, hi = support(state, quadrature)

    def rho(x: float) -> float:
        return float(density(state, quadrature, np.asarray(x, dtype=float)))

    raw = []
    for n, a, b in domain_intervals(part, lo, hi):
        m0, m1, m2 = _integrate_moments(rho, a, b)
        raw.append((n, m0, m1, m2))
    w = _clip_halfwidth(part)
    clipped = 0.0
    for edge in _boundaries_in(part, lo, hi):
        a, b = max(lo, edge - w), min(hi, edge + w)
        clipped += quad(rho, a, b, epsabs=1e-15, limit=200)[0]
    stats = _assemble(quadrature, raw, clipped)
    logger.debug(
        "domain_stats: state=%s quadrature=%s domains=%d V=%.6g clipped=%.3g",
        state.label(),
        quadrature,
        len(stats.domains),
        stats.variance,
        stats.clipped_fraction,
    )
    return stats


def grid_stats(grid: DensityGrid, part: DomainPartition) -> DomainStats:
    """Same statistics from a tabulated density (trapezoid rule)."""
    x, rho = grid.x, grid.density
    cums = [cumulative_trapezoid(f, x, initial=0.0) for f in (rho, x * rho, x * x * rho)]

    def between(cum: np.ndarray, a: float, b: float) -> float:
        return float(np.interp(b, x, cum) - np.interp(a, x, cum))

    lo, hi = float(x[0]), float(x[-1])
    raw = []
    for n, a, b in domain_intervals(part, lo, hi):
        m0, m1, m2 = (between(c, a, b) for c in cums)
        if m0 > 0:
            raw.append((n, m0, m1, m2))
    w = _clip_halfwidth(part)
    clipped = sum(
        between(cums[0], max(lo, e - w), min(hi, e + w)) for e in _boundaries_in(part, lo, hi)
    )
    return _assemble(grid.quadrature, raw, clipped)


def family_state(family: str, value: float) -> StateModel:
    """Member of a named state family at parameter ``value``.

    ``cat`` and ``coherent`` take alpha; the GKP variants and ``squeezed``
    take delta2; ``vacuum`` ignores the value.
    """
    half_pi = math.pi / 2
    match family:
        case "cat":
            return cat(value)
        case "coherent":
            return coherent(value)
        case "squeezed":
            return squeezed(value)
        case "vacuum":
            return vacuum()
        case "gkp0" | "gkp1":
            return gkp(int(family[-1]), value)
        case "gkp+":
            return gkp(0, value, rotation=half_pi)
        case "gkp-":
            return gkp(1, value, rotation=half_pi)
    raise DomainError(f"Unknown state family: {family}")


def _check_monotone(values: Sequence[float]) -> None:
    if len(values) == 0:
        raise DomainError("parameter grid is empty")
    steps = np.diff(values)
    if len(steps) and not (np.all(steps > 0) or np.all(steps < 0)):
        raise DomainError("parameter grid must be strictly monotone")


def sweep_variance(
    family: str,
    values: Sequence[float],
    quadrature: Quadrature,
    part: DomainPartition | None = None,
    *,
    workers: int = 1,
) -> list[tuple[float, float]]:
    """Return ``(param, V)`` for each parameter value, in input order."""
    _check_monotone(values)

    def one(value: float) -> tuple[float, float]:
        state = family_state(family, value)
        return float(value), domain_stats(state, quadrature, part).variance

    logger.info(
        "Process: sweep_variance | Family: %s | Quadrature: %s | Points: %d",
        family,
        quadrature,
        len(values),
    )
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, values))
    return [one(v) for v in values]


def sweep_rows(family: str, values: Sequence[float], *, workers: int = 1) -> list[tuple[float, float, float, float]]:
    """Return ``(param, V_q, V_p, clipped_fraction)`` rows for a sweep.

    The clipping column is the larger of the two quadratures' fractions.
    """
    _check_monotone(values)

    def one(value: float) -> tuple[float, float, float, float]:
        state = family_state(family, value)
        sq = domain_stats(state, "q")
        sp = domain_stats(state, "p")
        return float(value), sq.variance, sp.variance, max(sq.clipped_fraction, sp.clipped_fraction)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, values))
    return [one(v) for v in values]


def peak_separation(alpha: float) -> PeakSeparation:
    """Momentum domain width of a cat state over ``sqrt(V_p)``.

    Below ``alpha = 1`` the fringe decomposition degrades; the value is
    still computed but ``advisory`` is set and a warning is logged.
    """
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    advisory = alpha < 1
    if advisory:
        logger.warning("peak_separation_ratio: alpha=%g < 1, fringe decomposition is unreliable", alpha)
    state = cat(alpha)
    part = default_partition(state, "p")
    stats = domain_stats(state, "p", part)
    return PeakSeparation(
        alpha=alpha,
        period=part.period,
        variance=stats.variance,
        ratio=part.period / math.sqrt(stats.variance),
        advisory=advisory,
    )


def peak_separation_ratio(alpha: float) -> float:
    return peak_separation(alpha).ratio
