"""Decay curves for the localized limit statements."""

import numpy as np
import pytest

from scatter1d import (corollary_limits, gaussian_well, log_time_propagation,
                       rescale_window, rescaled_family)
from scatter1d.asymptotics import DecayCurve, _gamma1_cols, _band_basis
from scatter1d.errors import ContractError, RangeError
from scatter1d.grids import default_log_grid, reflect
from scatter1d.operators import apply_R
from scatter1d.scatter import threshold_smatrix

_COROLLARY = ("energy_below", "energy_above", "dilation_below", "dilation_above")


# ------------------------------- curve object -------------------------------


def _curve(norm, norm_star, parameter=None):
    norm = np.asarray(norm, float)
    parameter = (np.arange(norm.size, dtype=float)
                 if parameter is None else np.asarray(parameter, float))
    return DecayCurve(quantity="synthetic", parameter=parameter, norm=norm,
                      norm_star=np.asarray(norm_star, float), grid_note="")


def test_decay_curve_contracts():
    with pytest.raises(ContractError, match="monotone"):
        _curve([1.0, 0.5, 0.2], [1.0, 0.5, 0.2], parameter=[0.0, 2.0, 1.0])
    with pytest.raises(ContractError, match="nonnegative"):
        _curve([1.0, -0.5], [1.0, 0.5])


def test_jointly_converged_rules():
    # comparable finals converge jointly
    assert _curve([1.0, 0.1], [1.0, 0.3]).jointly_converged()
    # a 500x split between the finals does not
    assert not _curve([1.0, 0.5], [1.0, 1e-3]).jointly_converged()
    # unless both sit below the noise floor, where the ratio means nothing
    assert _curve([1.0, 5e-5], [1.0, 9e-7]).jointly_converged()
    c = _curve([1.0, 0.5], [1.0, 0.25])
    assert c.star_ratio() == pytest.approx(2.0)
    assert c.strictly_decreasing()
    assert not _curve([1.0, 1.0], [1.0, 0.5]).strictly_decreasing()


# ----------------------------- computed curves ------------------------------


def test_corollary_curves_decay(gauss_curves, thresholds):
    curves, _ = gauss_curves
    tol = thresholds["tol_corollary"]
    for name in _COROLLARY:
        c = curves[name]
        assert c.strictly_decreasing(), name
        assert c.final <= tol and c.final_star <= tol, name
        assert c.jointly_converged(thresholds["ratio_bound"],
                                   thresholds["ratio_floor"]), name


def test_log_time_curves_decay(gauss_curves):
    curves, _ = gauss_curves
    for name in ("log_time_past", "log_time_future"):
        c = curves[name]
        assert c.strictly_decreasing(), name
        assert max(c.final, c.final_star) < 1e-6, name


def test_rescaled_curves_decay(gauss_curves, thresholds):
    curves, _ = gauss_curves
    tol = thresholds["tol_proposition"]
    for name in ("rescaled_low_energy", "rescaled_high_energy"):
        c = curves[name]
        assert c.strictly_decreasing(), name
        assert c.final <= tol and c.final_star <= tol, name


def test_free_potential_curves_vanish(zero_curves, thresholds):
    curves, _ = zero_curves
    worst = max(max(c.norm.max(), c.norm_star.max()) for c in curves.values())
    assert worst <= thresholds["zero_floor"]


# ------------------------------- guard rails --------------------------------


def test_corollary_range_guards(gauss, grid, log_grid):
    with pytest.raises(ContractError, match="unknown quantity"):
        corollary_limits(gauss, "bogus", [1.0], grid, log_grid)
    with pytest.raises(RangeError, match="below the grid resolution"):
        corollary_limits(gauss, "energy_below", [1e-4], grid, log_grid)
    with pytest.raises(RangeError, match="resolvable band"):
        corollary_limits(gauss, "energy_above", [5000.0], grid, log_grid)
    with pytest.raises(RangeError, match="resolvable window"):
        corollary_limits(gauss, "dilation_below", [-1000.0], grid, log_grid)


def test_log_time_guards(gauss):
    with pytest.raises(ContractError, match="side"):
        log_time_propagation(gauss, [-1.0], side="sideways")
    with pytest.raises(RangeError, match="negative"):
        log_time_propagation(gauss, [1.0], side="past")
    with pytest.raises(RangeError, match="positive"):
        log_time_propagation(gauss, [-1.0], side="future")


def test_rescale_window_and_guard(gauss, grid):
    t_lo, t_hi = rescale_window(gauss, grid)
    assert t_lo == pytest.approx(np.log(4.0 * grid.dx), abs=1e-12)
    assert t_hi == pytest.approx(np.log(grid.x_max / 4.0), abs=1e-12)
    with pytest.raises(RangeError, match="admissible window"):
        rescaled_family(gauss, [t_hi + 1.0], grid)


# --------------------------- limit symbol identity --------------------------


def test_gamma1_matches_parity_reflection_route(gauss, grid):
    """For a generic threshold matrix diag(-1, 1) the dilation-edge symbol
    acts as R(A) on even functions and as the identity on odd ones."""
    s0 = threshold_smatrix(gauss, grid).parity
    B = _band_basis(grid, default_log_grid(), 8, 11)
    direct = _gamma1_cols(grid, s0, B)
    alt = np.empty_like(B)
    for j in range(B.shape[1]):
        even = 0.5 * (B[:, j] + reflect(grid, B[:, j]))
        odd = B[:, j] - even
        alt[:, j] = apply_R(grid, default_log_grid(), even) + odd
    gap = max(grid.norm(direct[:, j] - alt[:, j]) for j in range(B.shape[1]))
    assert gap < 2e-2
