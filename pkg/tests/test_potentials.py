"""Potential catalog: factories, decay certification, config parsing."""

import numpy as np
import pytest

from oracles import square_weighted_integral
from scatter1d import (Potential, delta_regularized, gaussian_well,
                       poschl_teller, square_well, weighted_norm)
from scatter1d.errors import ConfigError, ContractError, DecayError
from scatter1d.potentials import (custom_samples, load_samples_csv,
                                  parse_keyvalue_text, potential_from_mapping,
                                  require_compact_decay)


def test_factory_values():
    x = np.array([-1.0, 0.0, 0.5, 3.0])
    assert np.allclose(square_well(4.0, 2.0)(x), [-4.0, -4.0, -4.0, 0.0])
    assert gaussian_well(2.0, 1.0)(0.0) == -2.0
    assert np.isclose(poschl_teller(2.0, 1.0)(0.0), -2.0)
    # the regularized delta integrates to alpha
    V = delta_regularized(-2.0, 0.05)
    xs = np.linspace(-1.0, 1.0, 20001)
    assert abs(np.trapezoid(V(xs), xs) + 2.0) < 1e-10


def test_unknown_kind_rejected():
    with pytest.raises(ConfigError):
        Potential("coulomb", depth=1.0)


def test_weighted_norm_square_closed_form():
    V = square_well(4.0, 2.0)
    assert abs(weighted_norm(V, 2.0)
               - square_weighted_integral(4.0, 2.0)) < 1e-10


def test_weighted_norm_monotone_in_rho(gauss):
    vals = [weighted_norm(gauss, rho) for rho in (0.0, 1.0, 2.0, 2.6)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ContractError):
        weighted_norm(gauss, -1.0)


def test_catalog_passes_decay_hypothesis(gauss, pt_well, square4, delta_reg):
    for V in (gauss, pt_well, square4, delta_reg):
        require_compact_decay(V)


def test_slow_tail_refused_names_hypothesis():
    x = np.linspace(-39.0, 39.0, 801)
    V = custom_samples(x, -1.0 / (1.0 + np.abs(x)) ** 1.2)
    with pytest.raises(DecayError, match="rho > 5/2"):
        require_compact_decay(V)


def test_custom_samples_interpolates_and_vanishes_outside():
    x = np.linspace(-10.0, 10.0, 4001)
    V = custom_samples(x, -np.exp(-x ** 2))
    probe = np.array([-0.3, 0.123, 2.0])
    assert np.abs(V(probe) + np.exp(-probe ** 2)).max() < 1e-10
    assert V(np.array([15.0, -200.0])).max() == 0.0
    with pytest.raises(ContractError):
        custom_samples([0.0, 1.0, 0.5, 2.0], [1.0, 1.0, 1.0, 1.0])


def test_load_samples_csv_roundtrip(tmp_path):
    x = np.linspace(-8.0, 8.0, 1601)
    v = -2.0 * np.exp(-x ** 2)
    path = tmp_path / "well.csv"
    np.savetxt(path, np.column_stack([x, v]), delimiter=",")
    V = load_samples_csv(str(path))
    assert abs(V(0.0) + 2.0) < 1e-12
    bad = tmp_path / "bad.csv"
    bad.write_text("not,a\nnumber,file\n")
    with pytest.raises(ConfigError):
        load_samples_csv(str(bad))


def test_parse_keyvalue_text():
    text = "# a comment\nkind = gaussian_well\n\ndepth = 1.0\nwidth=2\n"
    assert parse_keyvalue_text(text) == {
        "kind": "gaussian_well", "depth": "1.0", "width": "2"}
    with pytest.raises(ConfigError, match="line"):
        parse_keyvalue_text("kind = a\nkind = b\n")
    with pytest.raises(ConfigError):
        parse_keyvalue_text("justakey\n")


def test_potential_from_mapping_strictness():
    V, rest = potential_from_mapping(
        {"kind": "square_well", "depth": "4", "width": "2", "seed": "3"})
    assert V.kind == "square_well" and rest == {"seed": "3"}
    with pytest.raises(ConfigError, match="kind"):
        potential_from_mapping({"depth": "4"})
    with pytest.raises(ConfigError):
        potential_from_mapping({"kind": "square_well", "depth": "4"})
    with pytest.raises(ConfigError):
        potential_from_mapping({"kind": "gaussian_well", "depth": "1",
                                "width": "1", "sigma": "0.1"})
    with pytest.raises(ConfigError):
        potential_from_mapping({"kind": "gaussian_well", "depth": "x",
                                "width": "1"})
