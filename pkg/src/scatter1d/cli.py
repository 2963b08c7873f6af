"""Command line driver: config parsing, orchestration, artifact emission.

Five subcommands mirror the library layers.  ``smatrix`` sweeps the
scattering coefficients and summarizes the discrete spectrum, ``levinson``
evaluates the winding identity, ``verify-structure`` checks the wave
operator against its edge-symbol decomposition, ``asymptotics`` traces the
restricted-norm decay curves against configured thresholds, and ``point``
works out the delta coupling from its closed form.

Configs are key=value text files parsed strictly: unknown keys are
rejected with the offending key named.  Runs are deterministic, so the
same config always produces bit-identical output files.  Exit statuses:
0 success, 1 physics assertion failure, 2 configuration error, 3 refused
range (undersampled or out-of-window request).  Curve sweeps can run on a
thread pool sized by the SCATTER1D_WORKERS environment variable; results
are assembled in a fixed order regardless of worker count.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from . import reporting
from .asymptotics import (DecayCurve, corollary_limits, log_time_propagation,
                          rescale_window, rescaled_family)
from .errors import ConfigError, ContractError, PhysicsError, RangeError
from .grids import DEFAULT_GRID, DEFAULT_LOG_GRID, LineGrid, LogGrid
from .levinson import levinson_report, point_report
from .potentials import Potential, parse_keyvalue_text, potential_from_mapping
from .scatter import K_MIN, bound_states, geometric_lambdas, s_matrix_sweep
from .waveop import (point_bound_profile, point_interaction_omega,
                     point_symbol, remainder_kernel, structure_residual)

WORKERS_ENV = "SCATTER1D_WORKERS"

_CURVE_FLOOR = 1e-8

_COROLLARY = ("energy_below", "energy_above", "dilation_below", "dilation_above")


# ------------------------------ run config ----------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Validated inputs of a single run (strict parse of a key=value file)."""

    command: str
    out_dir: str
    grid: LineGrid
    log_grid: LogGrid
    potential: Optional[Potential] = None
    alpha: Optional[float] = None
    seed: int = 11
    basis_size: int = 32
    k_min: float = K_MIN
    lambda_max: float = 64.0
    count: int = 2000
    substeps: Optional[int] = None
    side: str = "both"
    eps_below: Tuple[float, ...] = (1.0, 0.25, 0.0625, 0.015625)
    eps_above: Tuple[float, ...] = (1.0, 4.0, 16.0, 64.0)
    t_below: Tuple[float, ...] = (0.0, -2.0, -4.0, -8.0)
    t_above: Tuple[float, ...] = (0.0, 2.0, 4.0, 8.0)
    t_past: Tuple[float, ...] = (-1.0, -2.0, -4.0, -8.0)
    t_future: Tuple[float, ...] = (1.0, 2.0, 4.0, 8.0)
    t_rescaled: Tuple[float, ...] = (0.0, -0.5, -1.0, -1.5)
    t_rescaled_high: Tuple[float, ...] = (0.0, 0.5, 1.0, 1.5)
    tol_corollary: float = 0.2
    tol_proposition: float = 0.25
    workers: int = 1


def _as_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"key '{key}': cannot parse '{raw}' as an integer") from None


def _as_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"key '{key}': cannot parse '{raw}' as a number") from None


def _as_floats(key: str, raw: str) -> Tuple[float, ...]:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"key '{key}': empty number list")
    return tuple(_as_float(key, p) for p in parts)


def _as_str(key: str, raw: str) -> str:
    return raw


# key -> (RunConfig-construction slot, coercer); grid keys are pulled out
# separately because they feed the LineGrid/LogGrid constructors.
_GENERIC: Dict[str, Tuple[str, Callable[[str, str], object]]] = {
    "command": ("command_tag", _as_str),
    "out": ("out_dir", _as_str),
    "grid_n": ("grid_n", _as_int),
    "x_max": ("x_max", _as_float),
    "log_m": ("log_m", _as_int),
    "log_u_min": ("log_u_min", _as_float),
    "log_u_max": ("log_u_max", _as_float),
    "seed": ("seed", _as_int),
    "basis_size": ("basis_size", _as_int),
    "k_min": ("k_min", _as_float),
    "lambda_max": ("lambda_max", _as_float),
    "count": ("count", _as_int),
    "substeps": ("substeps", _as_int),
    "side": ("side", _as_str),
    "eps_below": ("eps_below", _as_floats),
    "eps_above": ("eps_above", _as_floats),
    "t_below": ("t_below", _as_floats),
    "t_above": ("t_above", _as_floats),
    "t_past": ("t_past", _as_floats),
    "t_future": ("t_future", _as_floats),
    "t_rescaled": ("t_rescaled", _as_floats),
    "t_rescaled_high": ("t_rescaled_high", _as_floats),
    "tol_corollary": ("tol_corollary", _as_float),
    "tol_proposition": ("tol_proposition", _as_float),
}

_POSITIVE_INTS = ("seed", "basis_size", "count", "substeps", "workers")
_POSITIVE_FLOATS = ("k_min", "lambda_max", "tol_corollary", "tol_proposition")


def load_config(path: str, command: str, grid_n: Optional[int] = None,
                seed: Optional[int] = None,
                out_dir: Optional[str] = None) -> RunConfig:
    """Parse and validate a config file for the given subcommand.

    Command line flags (--grid-n, --seed, --out) override config values.
    The ``point`` command describes the interaction by ``alpha`` alone;
    ``levinson`` accepts either a potential or a bare ``alpha`` (the
    closed-form path); every other command requires a potential.
    """
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    mapping = parse_keyvalue_text(text)

    potential = None
    alpha = None
    if command == "point":
        if "alpha" not in mapping:
            raise ConfigError("point command requires key 'alpha'")
        alpha = _as_float("alpha", mapping.pop("alpha"))
        rest = mapping
    elif command == "levinson" and "kind" not in mapping and "alpha" in mapping:
        alpha = _as_float("alpha", mapping.pop("alpha"))
        rest = mapping
    else:
        base = os.path.dirname(os.path.abspath(path))
        potential, rest = potential_from_mapping(mapping, base_dir=base)

    fields: Dict[str, object] = {}
    for key in sorted(rest):
        if key not in _GENERIC:
            raise ConfigError(f"unknown config key '{key}'")
        slot, coerce = _GENERIC[key]
        fields[slot] = coerce(key, rest[key])

    tag = fields.pop("command_tag", None)
    if tag is not None and tag != command:
        raise ConfigError(
            f"config names command '{tag}' but '{command}' was invoked")

    if grid_n is not None:
        fields["grid_n"] = int(grid_n)
    if seed is not None:
        fields["seed"] = int(seed)
    if out_dir is not None:
        fields["out_dir"] = out_dir
    fields.setdefault("out_dir", "scatter1d_out")

    n = fields.pop("grid_n", DEFAULT_GRID["n"])
    x_max = fields.pop("x_max", DEFAULT_GRID["x_max"])
    log_m = fields.pop("log_m", DEFAULT_LOG_GRID["m"])
    u_min = fields.pop("log_u_min", DEFAULT_LOG_GRID["u_min"])
    u_max = fields.pop("log_u_max", DEFAULT_LOG_GRID["u_max"])
    if n < 16 or x_max <= 0 or log_m < 16 or u_max <= u_min:
        raise ConfigError("grid parameters must be positive and ordered")
    try:
        grid = LineGrid(n=int(n), x_max=float(x_max))
        log_grid = LogGrid(m=int(log_m), u_min=float(u_min), u_max=float(u_max))
    except (ContractError, ValueError) as exc:
        raise ConfigError(f"invalid grid parameters: {exc}") from None

    try:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be a positive integer") from None
    fields["workers"] = workers

    for key in _POSITIVE_INTS:
        if key in fields and fields[key] < 1:
            raise ConfigError(f"key '{key}' must be a positive integer")
    for key in _POSITIVE_FLOATS:
        if key in fields and fields[key] <= 0:
            raise ConfigError(f"key '{key}' must be positive")
    if fields.get("side", "both") not in ("both", "minus", "plus"):
        raise ConfigError("key 'side' must be minus, plus, or both")

    cfg = RunConfig(command=command, grid=grid, log_grid=log_grid,
                    potential=potential, alpha=alpha, **fields)
    if cfg.lambda_max <= cfg.k_min ** 2:
        raise ConfigError("lambda_max must exceed k_min squared")
    return cfg


# ------------------------------- commands -----------------------------------


def _describe(cfg: RunConfig) -> Dict[str, object]:
    """Provenance keys stamped into every artifact of a run."""
    extra: Dict[str, object] = {"command": cfg.command, "seed": cfg.seed}
    if cfg.potential is not None:
        extra["potential"] = cfg.potential.kind
        for key in sorted(cfg.potential.params):
            val = cfg.potential.params[key]
            if isinstance(val, (int, float)):
                extra[f"potential_{key}"] = val
    if cfg.alpha is not None:
        extra["alpha"] = cfg.alpha
    return extra


def _sweep_lambdas(cfg: RunConfig) -> np.ndarray:
    return geometric_lambdas(cfg.k_min ** 2, cfg.lambda_max, cfg.count)


def cmd_smatrix(cfg: RunConfig) -> None:
    """S-matrix sweep CSV plus the spectral summary JSON."""
    lam = _sweep_lambdas(cfg)
    data = s_matrix_sweep(cfg.potential, lam, cfg.grid, cfg.substeps)
    summary = bound_states(cfg.potential, cfg.grid, cfg.substeps)
    meta = reporting.run_metadata(cfg.grid, k_min=cfg.k_min,
                                  lambda_max=cfg.lambda_max, count=cfg.count,
                                  **_describe(cfg))
    defect = np.maximum(
        np.abs(np.abs(data.t) ** 2 + np.abs(data.r_left) ** 2 - 1.0),
        np.abs(np.abs(data.t) ** 2 + np.abs(data.r_right) ** 2 - 1.0))
    reporting.write_table(
        os.path.join(cfg.out_dir, "smatrix_sweep.csv"),
        ["lam", "k", "t", "r_left", "r_right", "unitarity_defect"],
        [data.lam, data.k, data.t, data.r_left, data.r_right, defect], meta)
    payload = {
        "n_bound": summary.n_bound,
        "eigenvalues": list(summary.eigenvalues),
        "parities": list(summary.parities),
        "resonance": summary.resonance,
        "w0_magnitude": summary.w0_magnitude,
        "tau_res": summary.tau_res,
        "sweep_unitarity_defect": data.unitarity_defect(),
    }
    reporting.write_report(
        os.path.join(cfg.out_dir, "spectral_summary.json"), payload, meta)


def _report_payload(rep) -> Dict[str, object]:
    return {
        "w1": rep.w1, "w2": rep.w2, "w3": rep.w3, "w4": rep.w4,
        "total": rep.total, "n_bound": rep.n_bound,
        "classification": rep.classification,
        "time_delay_integral": rep.time_delay_integral,
        "discrepancy": rep.discrepancy, "valid": rep.valid,
        "diagnostics": dict(rep.diagnostics),
    }


def cmd_levinson(cfg: RunConfig) -> None:
    """Winding-identity JSON report plus the time-delay integrand CSV."""
    lam = _sweep_lambdas(cfg)
    if cfg.potential is None:
        rep = point_report(cfg.alpha, lam)
    else:
        rep = levinson_report(cfg.potential, cfg.grid, lam)
    meta = reporting.run_metadata(cfg.grid, k_min=cfg.k_min,
                                  lambda_max=cfg.lambda_max, count=cfg.count,
                                  **_describe(cfg))
    reporting.write_report(
        os.path.join(cfg.out_dir, "levinson_report.json"),
        _report_payload(rep), meta)
    reporting.write_table(
        os.path.join(cfg.out_dir, "time_delay_integrand.csv"),
        ["lam", "integrand"], [rep.lam_values, rep.time_delay_integrand], meta)


def cmd_verify_structure(cfg: RunConfig) -> None:
    """Edge-symbol residual report, singular values, and the kernel dump."""
    sides = ("minus", "plus") if cfg.side == "both" else (cfg.side,)
    meta = reporting.run_metadata(cfg.grid, side=cfg.side, **_describe(cfg))
    payload: Dict[str, object] = {}
    for side in sides:
        rep = structure_residual(cfg.potential, cfg.grid, side=side)
        payload[side] = {
            "residual_abs": rep.residual_abs,
            "residual_rel": (rep.residual_rel
                             if math.isfinite(rep.residual_rel) else None),
            "kernel_norm": rep.kernel_norm,
            "sigma_ratio_50": rep.sigma_ratio(50),
            "grid_note": rep.grid_note,
        }
        reporting.write_table(
            os.path.join(cfg.out_dir, f"structure_singular_values_{side}.csv"),
            ["index", "sigma"],
            [np.arange(1, rep.sigma.size + 1), rep.sigma], meta)
    kern = remainder_kernel(cfg.potential, cfg.grid)
    payload["kernel_envelopes"] = kern.envelope_constants()
    reporting.write_kernel(
        os.path.join(cfg.out_dir, "remainder_kernel.bin"), kern.values)
    reporting.write_report(
        os.path.join(cfg.out_dir, "structure_report.json"), payload, meta)


def _curve_passes(curve: DecayCurve, tol: float) -> bool:
    """Decay gate: decreasing (or already at the resolution floor),
    finals under the threshold, operator and adjoint landing together."""
    peak = max(float(np.max(curve.norm)), float(np.max(curve.norm_star)))
    shape_ok = peak <= _CURVE_FLOOR or curve.strictly_decreasing()
    return (shape_ok and curve.final <= tol and curve.final_star <= tol
            and curve.jointly_converged())


def cmd_asymptotics(cfg: RunConfig) -> None:
    """Decay-curve CSVs plus a pass/fail JSON against the thresholds."""
    V = cfg.potential
    g, lg, nb, seed = cfg.grid, cfg.log_grid, cfg.basis_size, cfg.seed
    tasks: Sequence[Tuple[str, Callable[[], DecayCurve]]] = (
        [(q, lambda q=q, p=p: corollary_limits(V, q, p, g, lg, nb, seed))
         for q, p in zip(_COROLLARY, (cfg.eps_below, cfg.eps_above,
                                      cfg.t_below, cfg.t_above))]
        + [("log_time_past",
            lambda: log_time_propagation(V, cfg.t_past, "past", g, lg, nb, seed)),
           ("log_time_future",
            lambda: log_time_propagation(V, cfg.t_future, "future", g, lg, nb, seed)),
           ("rescaled_low_energy",
            lambda: rescaled_family(V, cfg.t_rescaled, g, lg, nb, seed)[0]),
           ("rescaled_high_energy",
            lambda: rescaled_family(V, cfg.t_rescaled_high, g, lg, nb, seed)[1])])
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(fn) for _, fn in tasks]
            curves = [f.result() for f in futures]
    else:
        curves = [fn() for _, fn in tasks]

    lo, hi = rescale_window(V, g)
    meta = reporting.run_metadata(g, lg, basis_size=nb, rescale_window_lo=lo,
                                  rescale_window_hi=hi, **_describe(cfg))
    summary: Dict[str, object] = {}
    all_ok = True
    for (name, _), curve in zip(tasks, curves):
        tol = cfg.tol_corollary if name in _COROLLARY else cfg.tol_proposition
        ok = _curve_passes(curve, tol)
        all_ok = all_ok and ok
        summary[name] = {
            "final": curve.final, "final_star": curve.final_star,
            "threshold": tol,
            "strictly_decreasing": curve.strictly_decreasing(),
            "jointly_converged": curve.jointly_converged(),
            "passed": ok,
        }
        reporting.write_table(
            os.path.join(cfg.out_dir, f"asymptotics_{name}.csv"),
            ["parameter", "norm_T", "norm_Tstar"],
            [curve.parameter, curve.norm, curve.norm_star], meta)
    reporting.write_report(
        os.path.join(cfg.out_dir, "asymptotics_summary.json"),
        {"curves": summary, "passed": all_ok}, meta)


def cmd_point(cfg: RunConfig) -> None:
    """Closed-form delta coupling: symbol sweep, winding report, profile."""
    lam = _sweep_lambdas(cfg)
    k = np.sqrt(lam)
    sym = point_symbol(cfg.alpha, k)
    rep = point_report(cfg.alpha, lam)
    W = point_interaction_omega(cfg.alpha, cfg.grid, cfg.log_grid)
    meta = reporting.run_metadata(cfg.grid, cfg.log_grid, k_min=cfg.k_min,
                                  lambda_max=cfg.lambda_max, count=cfg.count,
                                  **_describe(cfg))
    reporting.write_table(
        os.path.join(cfg.out_dir, "point_symbol.csv"),
        ["lam", "k", "symbol"], [lam, k, sym], meta)
    payload = _report_payload(rep)
    payload["omega_band_count"] = int(W.k_band.size)
    payload["deficiency"] = rep.n_bound
    if cfg.alpha < 0:
        profile = point_bound_profile(cfg.alpha, cfg.grid)
        reporting.write_table(
            os.path.join(cfg.out_dir, "point_bound_profile.csv"),
            ["x", "profile"], [cfg.grid.points, profile.real], meta)
    reporting.write_report(
        os.path.join(cfg.out_dir, "point_report.json"), payload, meta)


_DISPATCH = {
    "smatrix": cmd_smatrix,
    "levinson": cmd_levinson,
    "verify-structure": cmd_verify_structure,
    "asymptotics": cmd_asymptotics,
    "point": cmd_point,
}


# --------------------------------- driver -----------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scatter1d",
        description="Wave-operator structure and Levinson-theorem toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "smatrix": "sweep scattering coefficients and summarize the spectrum",
        "levinson": "evaluate the winding identity total = -N",
        "verify-structure": "check the wave operator against its edge symbols",
        "asymptotics": "trace restricted-norm decay curves",
        "point": "delta coupling from the closed form",
    }
    for name in _DISPATCH:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", required=True, metavar="PATH",
                       help="key=value config file")
        p.add_argument("--out", metavar="DIR", default=None,
                       help="output directory (overrides config)")
        p.add_argument("--grid-n", type=int, default=None,
                       help="line grid size (overrides config)")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for test-vector bases (overrides config)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.command, grid_n=args.grid_n,
                          seed=args.seed, out_dir=args.out)
        os.makedirs(cfg.out_dir, exist_ok=True)
        _DISPATCH[cfg.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RangeError as exc:
        print(f"range error: {exc}", file=sys.stderr)
        return 3
    except (PhysicsError, ContractError) as exc:
        print(f"assertion failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
