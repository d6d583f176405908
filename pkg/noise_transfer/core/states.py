"""Quadrature wavefunctions of the supported single-mode states.

Convention: ``a = (q + i p) / 2`` so the vacuum has unit variance in both
quadratures, and the momentum representation uses the kernel
``exp(-i q p / 2) / sqrt(4 pi)``.  With this kernel the vacuum is symmetric
and ideal GKP momentum spikes sit at integer multiples of ``sqrt(2 pi)``.

Every state here is a finite sum of equal-width Gaussians

    Psi(q) = sum_k c_k exp(-(q - s_k)^2 / (4 sigma^2)),

which transforms term by term into

    Psi(p) = sigma sum_k c_k exp(-i s_k p / 2) exp(-sigma^2 p^2 / 4).

A cat state with amplitude alpha therefore has momentum fringes with
spacing ``pi / alpha``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from pydantic import ValidationError

from .config import numeric_setting
from .exceptions import DomainError, NumericError
from .schema import HALF_PI, DomainPartition, Quadrature, StateModel

logger = logging.getLogger(__name__)

__all__ = [
    "SQRT_2PI",
    "GaussianSum",
    "DensityGrid",
    "make_state",
    "vacuum",
    "coherent",
    "squeezed",
    "cat",
    "gkp",
    "gaussian_sum",
    "psi_q",
    "psi_p",
    "density",
    "density_grid",
    "support",
    "spikes",
    "default_partition",
]

SQRT_2PI = math.sqrt(2 * math.pi)


@dataclass(frozen=True)
class GaussianSum:
    """Position wavefunction as ``sum c_k exp(-(q - s_k)^2 / (4 sigma^2))``."""

    coeffs: np.ndarray
    centres: np.ndarray
    sigma: float

    def position(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        diff = q[..., None] - self.centres
        terms = self.coeffs * np.exp(-(diff**2) / (4 * self.sigma**2))
        return terms.sum(axis=-1).astype(complex)

    def momentum(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        phase = np.exp(-0.5j * p[..., None] * self.centres)
        envelope = np.exp(-(self.sigma**2) * p**2 / 4)
        return self.sigma * envelope * (self.coeffs * phase).sum(axis=-1)


@dataclass(frozen=True)
class DensityGrid:
    """Tabulated ``|Psi|^2`` on a uniform grid."""

    x: np.ndarray
    density: np.ndarray
    quadrature: Quadrature
    spacing: float

    def total(self) -> float:
        return float(np.trapezoid(self.density, dx=self.spacing))

    def moment(self, order: int) -> float:
        return float(np.trapezoid(self.x**order * self.density, dx=self.spacing))

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.density.tolist()))


def make_state(**fields) -> StateModel:
    """Build a :class:`StateModel`, reporting range violations as ``DomainError``."""
    try:
        return StateModel(**fields)
    except ValidationError as exc:
        raise DomainError(str(exc)) from exc


def vacuum(rotation: float = 0.0) -> StateModel:
    return make_state(kind="vacuum", rotation=rotation)


def coherent(alpha: float, rotation: float = 0.0) -> StateModel:
    return make_state(kind="coherent", alpha=alpha, rotation=rotation)


def squeezed(delta2: float, rotation: float = 0.0) -> StateModel:
    return make_state(kind="squeezed", delta2=delta2, rotation=rotation)


def cat(alpha: float, rotation: float = 0.0) -> StateModel:
    return make_state(kind="cat", alpha=alpha, rotation=rotation)


def gkp(mu: int, delta2: float, rotation: float = 0.0) -> StateModel:
    return make_state(kind="gkp", mu=mu, delta2=delta2, rotation=rotation)


def _gkp_terms(mu: int, delta2: float) -> tuple[np.ndarray, np.ndarray]:
    cutoff = numeric_setting("gkp_weight_cutoff")
    # envelope weight exp(-(pi/2) delta2 j^2) with j = 2n + mu
    j_max = math.sqrt(-2 * math.log(cutoff) / (math.pi * delta2))
    n_max = int(math.ceil((j_max + 1) / 2))
    j = 2 * np.arange(-n_max, n_max + 1) + mu
    weights = np.exp(-(math.pi / 2) * delta2 * j**2)
    keep = weights >= cutoff
    j, weights = j[keep], weights[keep]
    centres = SQRT_2PI * j * math.sqrt(1 - delta2**2)
    return weights, centres


@lru_cache(maxsize=256)
def gaussian_sum(state: StateModel) -> GaussianSum:
    """Return the unrotated position wavefunction as a :class:`GaussianSum`."""
    norm = (2 * math.pi) ** -0.25
    match state.kind:
        case "vacuum":
            return GaussianSum(np.array([norm]), np.array([0.0]), 1.0)
        case "coherent":
            return GaussianSum(np.array([norm]), np.array([2 * state.alpha]), 1.0)
        case "squeezed":
            sigma = math.sqrt(state.delta2)
            amp = (2 * math.pi * state.delta2) ** -0.25
            return GaussianSum(np.array([amp]), np.array([0.0]), sigma)
        case "cat":
            aleph = (2 + 2 * math.exp(-2 * state.alpha**2)) ** -0.5
            centres = np.array([2 * state.alpha, -2 * state.alpha])
            return GaussianSum(np.full(2, aleph * norm), centres, 1.0)
        case "gkp":
            sigma = math.sqrt(state.delta2)
            weights, centres = _gkp_terms(state.mu, state.delta2)
            # overlap of two normalised Gaussians of equal width
            diff = centres[:, None] - centres[None, :]
            overlap = np.exp(-(diff**2) / (8 * state.delta2))
            total = float(weights @ overlap @ weights)
            if not total > 0:
                raise NumericError("GKP normalisation vanished")
            amp = (2 * math.pi * state.delta2) ** -0.25 / math.sqrt(total)
            logger.debug(
                "gaussian_sum: gkp mu=%d delta2=%g terms=%d norm=%g",
                state.mu,
                state.delta2,
                len(weights),
                total,
            )
            return GaussianSum(amp * weights, centres, sigma)
    raise DomainError(f"Unsupported state kind: {state.kind}")


def psi_q(state: StateModel, q):
    """Position amplitude; for a rotated state this is the unrotated ``Psi(p)``."""
    terms = gaussian_sum(state)
    if state.rotated:
        return terms.momentum(q)
    return terms.position(q)


def psi_p(state: StateModel, p):
    """Momentum amplitude.

    The pi/2 rotation maps ``p -> -q``, so a rotated state's momentum
    amplitude is the unrotated position amplitude at ``-p``.
    """
    terms = gaussian_sum(state)
    if state.rotated:
        return terms.position(-np.asarray(p, dtype=float))
    return terms.momentum(p)


def density(state: StateModel, quadrature: Quadrature, x) -> np.ndarray:
    amp = psi_q(state, x) if quadrature == "q" else psi_p(state, x)
    return np.abs(amp) ** 2


def support(state: StateModel, quadrature: Quadrature) -> tuple[float, float]:
    """Interval outside which ``|Psi|^2`` is below the configured tail cutoff.

    Position densities are bounded by Gaussians of width sigma around the
    outermost centres; momentum densities by the envelope
    ``exp(-sigma^2 p^2 / 2)``.
    """
    cutoff = numeric_setting("tail_cutoff")
    reach = math.sqrt(-2 * math.log(cutoff)) + 1.0
    terms = gaussian_sum(state)
    position_like = (quadrature == "q") != state.rotated
    if position_like:
        lo = float(terms.centres.min()) - reach * terms.sigma
        hi = float(terms.centres.max()) + reach * terms.sigma
    else:
        half = reach / terms.sigma
        lo, hi = -half, half
    if quadrature == "p" and state.rotated:
        lo, hi = -hi, -lo
    return lo, hi


def density_grid(
    state: StateModel,
    quadrature: Quadrature,
    x_min: float | None = None,
    x_max: float | None = None,
    n_points: int | None = None,
) -> DensityGrid:
    """Tabulate ``|Psi|^2`` on a uniform grid.

    Omitted bounds are taken from :func:`support`, which keeps all but a
    negligible fraction of the probability.
    """
    n_points = n_points or int(numeric_setting("grid_points"))
    if n_points < 2:
        raise DomainError("n_points must be >= 2")
    if x_min is None or x_max is None:
        lo, hi = support(state, quadrature)
        x_min = lo if x_min is None else x_min
        x_max = hi if x_max is None else x_max
    if not x_min < x_max:
        raise DomainError(f"Degenerate grid range [{x_min}, {x_max}]")
    x = np.linspace(x_min, x_max, n_points)
    spacing = float(x[1] - x[0])
    return DensityGrid(x=x, density=density(state, quadrature, x), quadrature=quadrature, spacing=spacing)


def _position_like(state: StateModel, quadrature: Quadrature) -> bool:
    return (quadrature == "q") != state.rotated


def spikes(state: StateModel, quadrature: Quadrature) -> tuple[np.ndarray, np.ndarray]:
    """Lattice indices ``j`` (spike at ``j sqrt(2 pi)``) and normalised weights.

    This is the ideal-spike picture of a GKP state: computational states
    occupy the parity class ``mu`` in position and every lattice site in
    momentum, with density weights ``exp(-pi delta2 j^2)`` in both cases.
    """
    if state.kind != "gkp":
        raise DomainError("spike lattice is only defined for GKP states")
    cutoff = numeric_setting("gkp_weight_cutoff")
    j_max = int(math.ceil(math.sqrt(-math.log(cutoff) / (math.pi * state.delta2)))) + 1
    j = np.arange(-j_max, j_max + 1)
    if _position_like(state, quadrature):
        j = j[(j - state.mu) % 2 == 0]
    weights = np.exp(-math.pi * state.delta2 * j**2.0)
    keep = weights >= cutoff
    j, weights = j[keep], weights[keep]
    return j, weights / weights.sum()


def default_partition(state: StateModel, quadrature: Quadrature) -> DomainPartition:
    """Partition the statistics of ``state`` are normally taken over."""
    position_like = _position_like(state, quadrature)
    match state.kind:
        case "gkp":
            return DomainPartition(kind="lattice", period=SQRT_2PI)
        case "cat" if position_like:
            return DomainPartition(kind="sign")
        case "cat" if state.alpha > 0:
            return DomainPartition(kind="lattice", period=math.pi / state.alpha)
        case _:
            return DomainPartition(kind="explicit", boundaries=())
