"""Operator realizations: Hilbert transform, T, functions of A and H0."""

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from oracles import hilbert_gaussian, hilbert_lorentzian
from scatter1d import (apply_R, apply_T_fourier, apply_T_mellin, fourier,
                       function_of_A, function_of_H0, hilbert_transform,
                       inverse_fourier, r_symbols)
from scatter1d.grids import parity_split
from scatter1d.packets import dilation_safe_packets


def test_hilbert_closed_form_pairs(grid):
    """Against analytic transforms; the comparison is restricted to the
    interior since the periodic images contribute O(1/x_max) at the edges."""
    x = grid.points
    inner = np.abs(x) <= 10.0
    h1 = hilbert_transform(grid, np.exp(-0.5 * x * x).astype(complex))
    assert np.abs(h1 - hilbert_gaussian(x))[inner].max() < 1e-2
    h2 = hilbert_transform(grid, (1.0 / (1.0 + x * x)).astype(complex))
    assert np.abs(h2 - hilbert_lorentzian(x))[inner].max() < 1e-2


def test_hilbert_squares_to_minus_one(grid):
    """H^2 = -1 on vectors with no zero-momentum content."""
    rng = np.random.default_rng(0)
    f = rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)
    fk = fourier(grid, f)
    fk[grid.n // 2] = 0.0
    f = inverse_fourier(grid, fk)
    hh = hilbert_transform(grid, hilbert_transform(grid, f))
    assert np.abs(hh + f).max() < 1e-11


def test_T_preserves_parity_sectors(grid):
    """Interior slots stay sector-pure; the self-paired wrap sample at
    -x_max carries the sign(x) asymmetry and only sees the 1/x^2 tail."""
    x = grid.points
    even = np.exp(-0.5 * (x - 0.0) ** 2).astype(complex) * np.cos(2.0 * x)
    odd = (x * np.exp(-0.5 * x * x)).astype(complex)
    for f, sector in ((even, "odd"), (odd, "even")):
        out = apply_T_fourier(grid, f)
        pv = parity_split(grid, out)
        leak = getattr(pv, sector)
        assert np.abs(leak[1:-1]).max() < 1e-11
        assert np.abs(leak).max() < 2e-3


def test_T_realizations_agree(grid, log_grid):
    """Fourier-side and log-radial realizations of the same operator."""
    for f in dilation_safe_packets(grid, log_grid, 6, seed=4):
        a = apply_T_fourier(grid, f)
        b = apply_T_mellin(grid, log_grid, f)
        assert grid.norm(a - b) / grid.norm(f) < 1e-6


def test_r_symbols_identities():
    pair = r_symbols(np.linspace(-30.0, 30.0, 1001))
    pair.check(1e-12)
    assert np.abs(pair.r_even - np.conj(pair.r_odd)).max() < 1e-12
    # limits: r -> -/+ 1 along the dilation axis
    assert abs(pair.r_even[0] - 1.0) < 1e-12
    assert abs(pair.r_even[-1] + 1.0) < 1e-12


def test_function_of_A_identity_and_partition(grid, log_grid):
    ones = np.ones(log_grid.m)
    f = dilation_safe_packets(grid, log_grid, 3, seed=2)[0]
    assert grid.norm(function_of_A(grid, log_grid, f, ones, ones) - f) < 1e-4
    lower = (log_grid.duals <= 0.0).astype(float)
    upper = 1.0 - lower
    split = (function_of_A(grid, log_grid, f, lower, lower)
             + function_of_A(grid, log_grid, f, upper, upper))
    assert grid.norm(split - f) < 2e-4


def test_function_of_A_generates_dilations(grid, log_grid):
    """phi(a) = e^{i a tau} acts as (U_tau f)(x) = e^{tau/2} f(e^tau x)."""
    f = dilation_safe_packets(grid, log_grid, 3, seed=2)[0]
    tau = 0.25
    phi = np.exp(1j * log_grid.duals * tau)
    out = function_of_A(grid, log_grid, f, phi, phi)
    x = grid.points
    sp_re, sp_im = CubicSpline(x, f.real), CubicSpline(x, f.imag)
    xs = np.clip(np.exp(tau) * x, x[0], x[-1])
    dilated = np.exp(0.5 * tau) * (sp_re(xs) + 1j * sp_im(xs))
    assert np.abs(out - dilated).max() < 5e-3


def test_apply_R_unitary_on_safe_packets(grid, log_grid):
    for f in dilation_safe_packets(grid, log_grid, 4, seed=9):
        rf = apply_R(grid, log_grid, f)
        assert abs(grid.norm(rf) - grid.norm(f)) / grid.norm(f) < 1e-4


def test_function_of_H0_multipliers(grid):
    rng = np.random.default_rng(5)
    f = rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)
    assert np.abs(function_of_H0(grid, f, lambda lam: np.ones_like(lam))
                  - f).max() < 1e-12
    low = function_of_H0(grid, f, lambda lam: (lam <= 1.0).astype(float))
    high = function_of_H0(grid, f, lambda lam: (lam > 1.0).astype(float))
    assert np.abs(low + high - f).max() < 1e-11
    # projections are idempotent
    low2 = function_of_H0(grid, low, lambda lam: (lam <= 1.0).astype(float))
    assert np.abs(low2 - low).max() < 1e-11
