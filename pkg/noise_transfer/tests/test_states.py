"""Wavefunctions, densities and spike models of the supported states."""

import math

import numpy as np
import pytest

from noise_transfer.core.exceptions import DomainError
from noise_transfer.core.schema import HALF_PI
from noise_transfer.core.states import (
    SQRT_2PI,
    cat,
    coherent,
    default_partition,
    density,
    density_grid,
    gkp,
    make_state,
    psi_p,
    psi_q,
    spikes,
    squeezed,
    vacuum,
)


def test_vacuum_amplitudes():
    assert psi_q(vacuum(), 0.0) == pytest.approx((2 * math.pi) ** -0.25)
    p = np.linspace(-3, 3, 7)
    expected = (2 * math.pi) ** -0.25 * np.exp(-(p**2) / 4)
    assert np.allclose(psi_p(vacuum(), p), expected, atol=1e-14)


def test_cat_amplitude_at_peak():
    alpha = 2.0
    aleph = (2 + 2 * math.exp(-2 * alpha**2)) ** -0.5
    expected = aleph * (2 * math.pi) ** -0.25 * (1 + math.exp(-16))
    assert abs(psi_q(cat(alpha), 4.0)) == pytest.approx(expected, rel=1e-12)


def test_cat_momentum_fringes():
    alpha = 2.0
    state = cat(alpha)
    p = np.linspace(-3, 3, 6001)
    rho = density(state, "p", p)
    assert np.argmax(rho) == 3000
    # zeros of cos(alpha p) sit half a fringe from the peaks
    zero = math.pi / (2 * alpha)
    assert density(state, "p", zero) < 1e-12
    assert density(state, "p", math.pi / alpha) > 0.1 * rho.max()


def test_cat_reduces_to_vacuum():
    q = np.linspace(-6, 6, 121)
    assert np.max(np.abs(density(cat(0.0), "q", q) - density(vacuum(), "q", q))) < 1e-12


@pytest.mark.parametrize(
    "state",
    [
        vacuum(),
        coherent(1.0),
        squeezed(0.2),
        cat(1.5),
        gkp(0, 0.1),
        gkp(1, 0.05),
        gkp(0, 0.1, rotation=HALF_PI),
    ],
)
def test_densities_are_normalised(state):
    for quadrature in ("q", "p"):
        grid = density_grid(state, quadrature)
        assert grid.total() == pytest.approx(1.0, abs=1e-8)


def test_rotation_swaps_quadratures():
    x = np.linspace(-8, 8, 161)
    for mu in (0, 1):
        plain = gkp(mu, 0.1)
        rotated = gkp(mu, 0.1, rotation=HALF_PI)
        assert np.allclose(density(rotated, "q", x), density(plain, "p", x), atol=1e-10)
        assert np.allclose(density(rotated, "p", x), density(plain, "q", -x), atol=1e-10)


def test_gkp_position_peaks_follow_parity():
    state = gkp(1, 0.1)
    rho = lambda x: float(density(state, "q", x))
    assert rho(SQRT_2PI) > 100 * rho(0.0)
    assert rho(-SQRT_2PI) > 100 * rho(2 * SQRT_2PI)


def test_gkp_momentum_has_peaks_at_every_site():
    state = gkp(0, 0.05)
    p = np.linspace(-3.5 * SQRT_2PI, 3.5 * SQRT_2PI, 20001)
    rho = density(state, "p", p)
    inner = (rho[1:-1] > rho[:-2]) & (rho[1:-1] > rho[2:]) & (rho[1:-1] > 1e-3 * rho.max())
    peaks = p[1:-1][inner] / SQRT_2PI
    assert np.allclose(peaks, np.round(peaks), atol=0.01)
    assert sorted(np.round(peaks).astype(int)) == [-3, -2, -1, 0, 1, 2, 3]


def test_spikes():
    j, w = spikes(gkp(1, 0.1), "q")
    assert np.all(j % 2 == 1)
    assert w.sum() == pytest.approx(1.0)
    j, _ = spikes(gkp(0, 0.1), "p")
    assert set(j.tolist()) >= {-1, 0, 1}
    # the dual state carries the parity in momentum
    j, _ = spikes(gkp(0, 0.1, rotation=HALF_PI), "p")
    assert np.all(j % 2 == 0)
    with pytest.raises(DomainError):
        spikes(cat(2.0), "q")


def test_default_partitions():
    assert default_partition(gkp(0, 0.1), "p").period == pytest.approx(SQRT_2PI)
    assert default_partition(cat(2.0), "q").kind == "sign"
    assert default_partition(cat(2.0), "p").period == pytest.approx(math.pi / 2)
    assert default_partition(cat(2.0, rotation=HALF_PI), "p").kind == "sign"
    single = default_partition(vacuum(), "q")
    assert single.kind == "explicit" and single.boundaries == ()


@pytest.mark.parametrize(
    "fields",
    [
        {"kind": "cat", "alpha": -1.0},
        {"kind": "gkp", "mu": 0, "delta2": 1.0},
        {"kind": "gkp", "mu": 2, "delta2": 0.1},
        {"kind": "squeezed"},
        {"kind": "vacuum", "rotation": 1.0},
    ],
)
def test_invalid_states(fields):
    with pytest.raises(DomainError):
        make_state(**fields)


def test_density_grid_validation():
    with pytest.raises(DomainError):
        density_grid(vacuum(), "q", n_points=1)
    with pytest.raises(DomainError):
        density_grid(vacuum(), "q", x_min=1.0, x_max=1.0)


def test_state_labels():
    assert gkp(0, 0.1, rotation=HALF_PI).label() == "gkp+"
    assert gkp(1, 0.1).label() == "gkp1"
    assert cat(2.0).label() == "cat(2)"
