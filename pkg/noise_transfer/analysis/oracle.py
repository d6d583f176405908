"""Exact quadrature marginals under single-mode loss and amplification.

A quadrature passing a Gaussian channel becomes ``s X + Z`` with ``Z``
normal of variance ``v`` (loss: ``s = sqrt(eta)``, ``v = 1 - eta``;
amplifier: ``s = g``, ``v = g^2 - 1``).  Its marginal is therefore the
rescaled input marginal convolved with a Gaussian, which needs no density
matrix and checks the engine's transfer rule ``V -> s^2 V + v``.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.signal import fftconvolve

from ..core.domains import domain_stats, grid_stats, scale_partition
from ..core.exceptions import NumericError
from ..core.schema import ChannelSpec, Quadrature, StateModel, ValidationSummary
from ..core.states import DensityGrid, default_partition, density_grid
from ..core.templates import render

logger = logging.getLogger(__name__)

__all__ = ["CLIPPED_LIMIT", "loss", "amplifier", "push_marginal", "validate_transfer", "summary"]

# above this clipped fraction agreement with the formula is not claimed
CLIPPED_LIMIT = 0.05


def loss(eta: float) -> ChannelSpec:
    return ChannelSpec(kind="loss", value=eta)


def amplifier(gain: float) -> ChannelSpec:
    return ChannelSpec(kind="amp", value=gain)


def push_marginal(grid: DensityGrid, spec: ChannelSpec) -> DensityGrid:
    """Marginal of the channel output on a grid padded by six kernel widths."""
    scale, var = spec.scale, spec.added_variance
    h = grid.spacing * scale
    x = grid.x * scale
    rho = grid.density / scale
    if var <= 0:
        return DensityGrid(x=x, density=rho, quadrature=grid.quadrature, spacing=h)
    sigma = math.sqrt(var)
    if h > sigma / 4:
        raise NumericError(
            f"grid spacing {h:.4g} is too coarse for a kernel of width {sigma:.4g}"
        )
    pad = int(math.ceil(6 * sigma / h))
    x = np.concatenate([x[0] - h * np.arange(pad, 0, -1), x, x[-1] + h * np.arange(1, pad + 1)])
    rho = np.pad(rho, pad)
    k = h * np.arange(-pad, pad + 1)
    kernel = np.exp(-(k**2) / (2 * var)) / math.sqrt(2 * math.pi * var) * h
    out = np.clip(fftconvolve(rho, kernel, mode="same"), 0.0, None)
    total = float(np.trapezoid(out, dx=h))
    if not total > 0:
        raise NumericError("pushed marginal vanished")
    logger.debug(
        "push_marginal: %s points=%d pad=%d mass_before_norm=%.12g",
        spec.label(),
        len(x),
        pad,
        total,
    )
    return DensityGrid(x=x, density=out / total, quadrature=grid.quadrature, spacing=h)


def validate_transfer(
    state: StateModel,
    quadrature: Quadrature,
    spec: ChannelSpec,
    n_points: int | None = None,
) -> ValidationSummary:
    """Compare the oracle's domain variance with ``s^2 V + v``.

    The output is analysed on the input partition scaled by ``s``, since
    the expected signal values scale with the channel.
    """
    part = default_partition(state, quadrature)
    before = domain_stats(state, quadrature, part)
    pushed = push_marginal(density_grid(state, quadrature, n_points=n_points), spec)
    after = grid_stats(pushed, scale_partition(part, spec.scale))
    s2, v = spec.scale**2, spec.added_variance
    formula_v = s2 * before.variance + v
    rel_err = abs(after.variance - formula_v) / formula_v
    regime = "clipped" if after.clipped_fraction >= CLIPPED_LIMIT else "localized"
    result = ValidationSummary(
        state=state.label(),
        quadrature=quadrature,
        channel=spec.label(),
        oracle_v=after.variance,
        formula_v=formula_v,
        rel_err=rel_err,
        clipped_fraction=after.clipped_fraction,
        regime=regime,
        second_moment_oracle=after.second_moment,
        second_moment_formula=s2 * before.second_moment + v,
    )
    logger.info(
        "Process: validate_transfer | State: %s | Quadrature: %s | Channel: %s | rel_err=%.3g | regime=%s",
        result.state,
        quadrature,
        result.channel,
        rel_err,
        regime,
    )
    return result


def summary(result: ValidationSummary) -> str:
    return render("oracle_summary", summary=result)
