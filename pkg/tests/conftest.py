"""Shared fixtures: grids, catalog potentials, and the expensive pipelines.

The wave-operator builds and the decay-curve sweeps dominate the suite's
runtime, so they are computed once per session and shared between the
module tests and the acceptance gate.  Fixtures that back timed acceptance
criteria record their own wall-clock duration at compute time.
"""

import json
import os
import time

import numpy as np
import pytest

from scatter1d import (LineGrid, build_wave_operator, default_grid,
                       default_log_grid, delta_regularized, gaussian_well,
                       levinson_report, poschl_teller, square_well,
                       structure_residual)
from scatter1d.asymptotics import (corollary_limits, log_time_propagation,
                                   rescaled_family)

HERE = os.path.dirname(os.path.abspath(__file__))


def load_thresholds():
    with open(os.path.join(HERE, "data", "thresholds.json")) as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def thresholds():
    return load_thresholds()


@pytest.fixture(scope="session")
def grid():
    return default_grid()


@pytest.fixture(scope="session")
def log_grid():
    return default_log_grid()


@pytest.fixture(scope="session")
def gauss():
    return gaussian_well(1.0, 1.0)


@pytest.fixture(scope="session")
def pt_well():
    return poschl_teller(2.0, 1.0)


@pytest.fixture(scope="session")
def square4():
    return square_well(4.0, 2.0)


@pytest.fixture(scope="session")
def delta_reg():
    return delta_regularized(-2.0, 0.05)


@pytest.fixture(scope="session")
def zero_well():
    return gaussian_well(0.0, 1.0)


@pytest.fixture(scope="session")
def w_gauss(gauss, grid):
    return build_wave_operator(gauss, grid)


@pytest.fixture(scope="session")
def pt_report(pt_well, grid):
    return levinson_report(pt_well, grid)


@pytest.fixture(scope="session")
def square4_report(square4, grid):
    return levinson_report(square4, grid)


@pytest.fixture(scope="session")
def structure_reports(gauss):
    """Structure residuals for both sides at n and 2n, with the wall time."""
    start = time.monotonic()
    reports = {}
    for n in (2048, 4096):
        g = LineGrid(n=n, x_max=40.0)
        for side in ("minus", "plus"):
            reports[(n, side)] = structure_residual(gauss, g, side=side)
    elapsed = time.monotonic() - start
    return reports, elapsed


def _curve_suite(V, thresholds):
    grid = default_grid()
    log_grid = default_log_grid()
    p = thresholds["parameters"]
    nb = thresholds["basis_size"]
    seed = thresholds["seed"]
    curves = {}
    for q in ("energy_below", "energy_above", "dilation_below", "dilation_above"):
        curves[q] = corollary_limits(V, q, p[q], grid, log_grid, nb, seed)
    curves["log_time_past"] = log_time_propagation(
        V, p["log_time_past"], "past", grid, log_grid, nb, seed)
    curves["log_time_future"] = log_time_propagation(
        V, p["log_time_future"], "future", grid, log_grid, nb, seed)
    curves["rescaled_low_energy"] = rescaled_family(
        V, p["rescaled_low"], grid, log_grid, nb, seed)[0]
    curves["rescaled_high_energy"] = rescaled_family(
        V, p["rescaled_high"], grid, log_grid, nb, seed)[1]
    return curves


@pytest.fixture(scope="session")
def gauss_curves(gauss, thresholds):
    """All eight decay curves for the gaussian well, with the wall time."""
    start = time.monotonic()
    curves = _curve_suite(gauss, thresholds)
    return curves, time.monotonic() - start


@pytest.fixture(scope="session")
def zero_curves(zero_well, thresholds):
    """The same eight curves for V = 0, with the wall time."""
    start = time.monotonic()
    curves = _curve_suite(zero_well, thresholds)
    return curves, time.monotonic() - start
