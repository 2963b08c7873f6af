"""Grid and transform layer: unitarity, round trips, parity bookkeeping."""

import numpy as np
import pytest

from scatter1d import LineGrid, LogGrid
from scatter1d.errors import ContractError
from scatter1d.grids import (DEFAULT_GRID, DEFAULT_LOG_GRID, fourier, half_axis,
                             inverse_fourier, inverse_mellin, mellin,
                             mellin_norm, parity_join, parity_norm,
                             parity_split, reflect)


def random_vector(grid, seed, localized=True):
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)
    if localized:
        f *= np.exp(-0.5 * (grid.points / (0.2 * grid.x_max)) ** 2)
    return f


def test_default_grids_shapes(grid, log_grid):
    assert grid.n == DEFAULT_GRID["n"] and grid.x_max == DEFAULT_GRID["x_max"]
    assert log_grid.m == DEFAULT_LOG_GRID["m"]
    assert grid.points[0] == -grid.x_max
    assert grid.momenta[grid.n // 2] == 0.0
    assert np.allclose(np.diff(grid.momenta), grid.dk)
    assert np.allclose(np.diff(log_grid.duals),
                       2.0 * np.pi / (log_grid.u_max - log_grid.u_min))


def test_grid_validation():
    with pytest.raises(ContractError):
        LineGrid(n=1000, x_max=40.0)   # not a power of two
    with pytest.raises(ContractError):
        LineGrid(n=2048, x_max=-1.0)
    with pytest.raises(ContractError):
        LogGrid(m=4096, u_min=2.0, u_max=-2.0)


def test_fourier_roundtrip_and_unitarity(grid):
    for seed in range(5):
        f = random_vector(grid, seed, localized=False)
        fk = fourier(grid, f)
        assert np.abs(inverse_fourier(grid, fk) - f).max() < 1e-12
        # Plancherel with the dx / dk measures
        assert abs(np.sqrt(grid.dk * np.sum(np.abs(fk) ** 2))
                   - grid.norm(f)) < 1e-10


def test_fourier_translation_phase(grid):
    """A cyclic shift by m cells is the multiplier e^{-i k m dx}."""
    f = random_vector(grid, 3)
    shifted = np.roll(f, 5)
    lhs = fourier(grid, shifted)
    rhs = fourier(grid, f) * np.exp(-1j * grid.momenta * 5 * grid.dx)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_fourier_batches_columns(grid):
    cols = np.column_stack([random_vector(grid, s) for s in range(3)])
    batch = fourier(grid, cols)
    for j in range(3):
        assert np.abs(batch[:, j] - fourier(grid, cols[:, j])).max() < 1e-13


def test_reflect_involution_and_parity(grid):
    f = random_vector(grid, 1)
    assert np.abs(reflect(grid, reflect(grid, f)) - f).max() == 0.0
    even = np.exp(-grid.points ** 2).astype(complex)
    assert np.abs(reflect(grid, even) - even).max() < 1e-15


def test_parity_split_roundtrip_unitary(grid):
    f = random_vector(grid, 2)
    pv = parity_split(grid, f)
    back = parity_join(grid, pv)
    assert np.abs(back - f).max() < 1e-12
    assert abs(parity_norm(grid, pv) - grid.norm(f)) < 1e-10
    assert pv.odd[0] == 0.0                      # x = 0 slot is even-only
    assert half_axis(grid)[-1] == grid.x_max


def test_parity_sectors_pure(grid):
    x = grid.points
    even = np.exp(-x ** 2).astype(complex)
    odd = (x * np.exp(-x ** 2)).astype(complex)
    assert np.abs(parity_split(grid, even).odd).max() < 1e-15
    assert np.abs(parity_split(grid, odd).even).max() < 1e-15


def test_mellin_roundtrip_and_norm(log_grid):
    """Round trip and unitarity on a half-line bump in the resolvable band."""
    r = log_grid.radii
    h = (np.exp(-0.5 * ((np.log(r) - 1.0) / 0.4) ** 2)).astype(complex)
    ga = mellin(log_grid, h)
    back = inverse_mellin(log_grid, ga)
    assert np.abs(back - h).max() < 1e-12
    assert abs(np.sqrt(np.sum(np.abs(ga) ** 2)
                       * (2.0 * np.pi / (log_grid.u_max - log_grid.u_min)))
               - mellin_norm(log_grid, h)) < 1e-10


def test_mellin_dilation_is_modulation(log_grid):
    """Dilating h by e^s multiplies the transform by a phase e^{i a s}.

    On the log grid a dilation is an integer shift of the samples (s a
    multiple of du), with the Jacobian factor e^{s/2} keeping norms fixed.
    """
    r = log_grid.radii
    h = (np.exp(-0.5 * ((np.log(r) - 1.0) / 0.4) ** 2)).astype(complex)
    shift = 32
    s = shift * log_grid.du
    hs = np.roll(h, -shift) * np.exp(0.5 * s)
    hs[-shift:] = 0.0
    lhs = mellin(log_grid, hs)
    rhs = mellin(log_grid, h) * np.exp(1j * log_grid.duals * s)
    # the rolled tail is empty for this bump, so agreement is exact
    assert np.abs(lhs - rhs).max() < 1e-10
