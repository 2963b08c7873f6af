"""Winding numbers on the boundary square and the bound-state count."""

import numpy as np
import pytest

from scatter1d import (boundary_symbols, gaussian_well, levinson_report,
                       point_report, w1_closed_form, winding_phase,
                       winding_trace)
from scatter1d.errors import (ContractError, PhysicsError,
                              UndersampledPathError)


# ----------------------------- winding helpers ------------------------------


def test_winding_phase_scalar_loop():
    th = np.linspace(0.0, 2.0 * np.pi, 257)
    assert abs(winding_phase(np.exp(1j * th)) - 1.0) < 1e-12
    assert abs(winding_phase(np.exp(-2j * th)) + 2.0) < 1e-12


def test_winding_trace_agrees_with_phase():
    th = np.linspace(0.0, 2.0 * np.pi, 513)
    path = np.zeros((th.size, 2, 2), dtype=complex)
    path[:, 0, 0] = np.exp(1j * th)
    path[:, 1, 1] = np.exp(-2j * th)
    wp = winding_phase(path)
    wt = winding_trace(path)
    assert abs(wp + 1.0) < 1e-12
    assert abs(wt - wp) < 1e-3


def test_winding_phase_refuses_coarse_path():
    th = np.linspace(0.0, 2.0 * np.pi, 5)
    with pytest.raises(UndersampledPathError):
        winding_phase(np.exp(1j * th))


def test_winding_refuses_near_singular_path():
    with pytest.raises(ContractError):
        winding_phase(np.linspace(1.0, 0.1, 16) + 0j)
    bad = np.broadcast_to(0.1 * np.eye(2, dtype=complex), (8, 2, 2))
    with pytest.raises(ContractError):
        winding_trace(bad)


def test_w1_closed_form_classes():
    assert w1_closed_form(np.diag([-1.0, 1.0])) == pytest.approx(-0.5)
    assert w1_closed_form(np.diag([-1.0, -1.0])) == pytest.approx(0.0)
    assert w1_closed_form(np.eye(2)) == pytest.approx(0.0)
    with pytest.raises(PhysicsError):
        w1_closed_form(np.diag([-0.5, 1.0]))
    with pytest.raises(PhysicsError):
        w1_closed_form(np.diag([1j, 1.0]))
    with pytest.raises(ContractError):
        w1_closed_form(np.eye(3))


# ----------------------------- boundary symbols -----------------------------


def test_boundary_symbol_shapes_and_defects(pt_well, grid):
    bsym = boundary_symbols(pt_well, grid, a_count=512)
    assert bsym.gamma1.shape == (512, 2, 2)
    assert bsym.gamma2.shape == (bsym.lam_values.size, 2, 2)
    assert bsym.lam_values[0] == 0.0
    assert max(bsym.corner_defects().values()) < 1e-8
    # the lam = 0 slot is the extrapolated threshold matrix, whose
    # unitarity is limited by the fit rather than the sweep
    assert bsym.max_unitarity_defect() < 1e-6
    assert 0.0 < bsym.tail_gap < 0.5


# ------------------------------ full reports --------------------------------


def test_reflectionless_well_report(pt_report):
    assert pt_report.classification == "exceptional"
    assert pt_report.valid
    assert pt_report.n_bound == 1
    assert abs(pt_report.total + 1.0) < 1e-2
    assert abs(pt_report.w1) < 2e-2
    assert abs(pt_report.time_delay_integral - 1.0) < 5e-3
    d = pt_report.diagnostics
    assert abs(d["even_total"] + 1.0) < 2e-2
    assert abs(d["odd_total"]) < 2e-2
    assert d["corner_defect"] < 1e-8
    assert d["unitarity_defect"] < 1e-6


def test_square_well_report(square4_report):
    assert square4_report.classification == "generic"
    assert square4_report.valid
    assert square4_report.n_bound == 2
    assert abs(square4_report.total + 2.0) < 1e-2
    assert abs(square4_report.w1 + 0.5) < 2e-2
    assert abs(square4_report.time_delay_integral - 1.5) < 5e-3
    d = square4_report.diagnostics
    assert d["w1_closed_form_gap"] < 1e-2
    assert d["even_bound"] == 1.0 and d["odd_bound"] == 1.0
    assert abs(d["even_total"] + 1.0) < 2e-2
    assert abs(d["odd_total"] + 1.0) < 2e-2


def test_free_potential_report(grid):
    rep = levinson_report(gaussian_well(0.0, 1.0), grid)
    assert rep.n_bound == 0
    assert abs(rep.total) < 1e-8
    assert abs(rep.w1) < 1e-8
    assert abs(rep.time_delay_integral) < 1e-8
    assert rep.valid


def test_point_coupling_reports():
    rep = point_report(-2.0)
    assert rep.classification == "generic"
    assert rep.n_bound == 1
    assert abs(rep.total + 1.0) < 1e-2
    assert abs(rep.time_delay_integral - 0.5) < 5e-3
    assert rep.valid

    rep_pos = point_report(2.0)
    assert rep_pos.n_bound == 0
    assert abs(rep_pos.total) < 1e-2
    assert abs(rep_pos.time_delay_integral + 0.5) < 5e-3
    assert rep_pos.valid

    rep_free = point_report(0.0)
    assert rep_free.classification == "exceptional"
    assert rep_free.n_bound == 0
    assert abs(rep_free.total) < 1e-8
    assert abs(rep_free.time_delay_integral) < 1e-8
