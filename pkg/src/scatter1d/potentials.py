"""Potential catalog, weighted integrability norms, and config parsing.

Sign convention: a positive ``depth`` is an attractive well (V <= 0).  All
catalog members are even functions of x and decay fast enough for every
weighted norm used here; custom sampled potentials are checked before any
norm with an unbounded weight is reported.
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import ConfigError, ContractError, DecayError

CATALOG_KINDS = (
    "square_well",
    "gaussian_well",
    "poschl_teller",
    "delta_regularized",
    "custom_samples",
)

# Weight exponents cached on every potential.  The last entry sits a margin
# above 5/2; remainder-kernel compactness diagnostics require it to be finite.
RHO_KEYS = (1.0, 2.0, 2.6)
RHO_COMPACTNESS = 2.6

_EDGE_DECAY = 1e-10


class Potential:
    """A real potential on the line with closed-form or sampled values.

    Attributes
    ----------
    kind : str
        One of the catalog kinds.
    params : dict
        The defining parameters (depth/width, alpha/sigma, or sample arrays).
    """

    def __init__(self, kind: str, **params):
        if kind not in CATALOG_KINDS:
            raise ConfigError(f"unknown potential kind '{kind}'")
        self.kind = kind
        self.params = dict(params)
        self._rho_norms: Dict[float, float] = {}
        if kind == "custom_samples":
            x = np.asarray(params["x"], dtype=float)
            v = np.asarray(params["v"], dtype=float)
            if x.shape != v.shape or x.ndim != 1 or x.size < 4:
                raise ContractError("custom samples need matching 1-d arrays, >= 4 points")
            if np.any(np.diff(x) <= 0):
                raise ContractError("custom sample abscissas must increase strictly")
            self._spline = CubicSpline(x, v, extrapolate=False)
            self._span = (float(x[0]), float(x[-1]))

    # ------------------------------------------------------------------ call

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "square_well":
            half = 0.5 * p["width"]
            return np.where(np.abs(x) <= half, -p["depth"], 0.0)
        if self.kind == "gaussian_well":
            return -p["depth"] * np.exp(-((x / p["width"]) ** 2))
        if self.kind == "poschl_teller":
            return -p["depth"] / np.cosh(x / p["width"]) ** 2
        if self.kind == "delta_regularized":
            s = p["sigma"]
            return p["alpha"] * np.exp(-0.5 * (x / s) ** 2) / (s * math.sqrt(2.0 * math.pi))
        vals = self._spline(x)
        return np.where(np.isnan(vals), 0.0, vals)

    def __repr__(self) -> str:
        inner = ", ".join(
            f"{k}={v:.6g}" for k, v in self.params.items() if np.isscalar(v)
        )
        return f"Potential({self.kind}, {inner})"

    # ------------------------------------------------------------ transforms

    def rescaled(self, t: float) -> "Potential":
        """The dilated family member e^{-2t} V(e^{-t} x).

        Spatial features spread by e^{t} while the strength scales by e^{-2t};
        every catalog kind is closed under this map.
        """
        p = self.params
        if self.kind in ("square_well", "gaussian_well", "poschl_teller"):
            return Potential(self.kind, depth=p["depth"] * math.exp(-2.0 * t),
                             width=p["width"] * math.exp(t))
        if self.kind == "delta_regularized":
            return Potential(self.kind, alpha=p["alpha"] * math.exp(-t),
                             sigma=p["sigma"] * math.exp(t))
        x = np.asarray(p["x"]) * math.exp(t)
        v = np.asarray(p["v"]) * math.exp(-2.0 * t)
        return Potential(self.kind, x=x, v=v)

    @property
    def feature_scale(self) -> float:
        """Smallest length over which the potential varies appreciably."""
        p = self.params
        if self.kind == "square_well":
            return p["width"]
        if self.kind in ("gaussian_well", "poschl_teller"):
            return p["width"]
        if self.kind == "delta_regularized":
            return p["sigma"]
        x = np.asarray(p["x"])
        return float(np.min(np.diff(x)) * 4.0)

    # ----------------------------------------------------------- decay norms

    @property
    def rho_norms(self) -> Dict[float, float]:
        """Cached weighted norms int <x>^rho |V| dx for rho in RHO_KEYS."""
        if not self._rho_norms:
            for rho in RHO_KEYS:
                try:
                    self._rho_norms[rho] = weighted_norm(self, rho)
                except DecayError:
                    self._rho_norms[rho] = math.inf
        return self._rho_norms


def weighted_norm(V: Potential, rho: float) -> float:
    """int <x>^rho |V(x)| dx with <x> = sqrt(1 + x^2).

    Catalog kinds are integrated to infinity with adaptive quadrature.
    Sampled potentials are integrated over their support by the trapezoid
    rule and must have decayed below 1e-10 (relative to their peak) at the
    sample edges; otherwise the tail cannot be certified and a
    :class:`DecayError` is raised.
    """
    if rho < 0:
        raise ContractError("weight exponent must be nonnegative")
    if V.kind == "custom_samples":
        x = np.asarray(V.params["x"], dtype=float)
        v = np.asarray(V.params["v"], dtype=float)
        peak = np.max(np.abs(v))
        if peak > 0 and (abs(v[0]) > _EDGE_DECAY * peak or abs(v[-1]) > _EDGE_DECAY * peak):
            raise DecayError(
                "sampled potential has not decayed at its edges; the weighted "
                f"tail for rho={rho} cannot be bounded"
            )
        w = (1.0 + x ** 2) ** (0.5 * rho)
        return float(np.trapezoid(w * np.abs(v), x))

    def integrand(x):
        return (1.0 + x * x) ** (0.5 * rho) * abs(float(V(x)))

    if V.kind == "square_well":
        half = 0.5 * V.params["width"]
        val, _ = quad(integrand, 0.0, half, limit=200)
        return 2.0 * val
    scale = V.feature_scale
    val, _ = quad(integrand, 0.0, 20.0 * scale, limit=400)
    tail, _ = quad(integrand, 20.0 * scale, np.inf, limit=400)
    return 2.0 * (val + tail)


def require_compact_decay(V: Potential) -> None:
    """Refuse potentials whose <x>^rho weight (rho > 5/2) is not finite."""
    if not math.isfinite(V.rho_norms[RHO_COMPACTNESS]):
        raise DecayError(
            "potential fails the decay hypothesis: a finite integral of "
            "<x>^rho |V| with rho > 5/2 is required for the remainder-kernel "
            "compactness diagnostics"
        )


def edge_decayed(V: Potential, x_max: float, tol: float = 1e-8) -> bool:
    """True when |V| at the grid edge is negligible against its peak."""
    xs = np.linspace(-x_max, x_max, 4097)
    vals = np.abs(V(xs))
    peak = float(np.max(vals))
    if peak == 0.0:
        return True
    edge = max(vals[0], vals[-1])
    return edge <= tol * peak


# ----------------------------- factories -----------------------------------


def square_well(depth: float, width: float) -> Potential:
    return Potential("square_well", depth=float(depth), width=float(width))


def gaussian_well(depth: float, width: float = 1.0) -> Potential:
    return Potential("gaussian_well", depth=float(depth), width=float(width))


def poschl_teller(depth: float = 2.0, width: float = 1.0) -> Potential:
    return Potential("poschl_teller", depth=float(depth), width=float(width))


def delta_regularized(alpha: float, sigma: float = 0.05) -> Potential:
    return Potential("delta_regularized", alpha=float(alpha), sigma=float(sigma))


def custom_samples(x: Iterable[float], v: Iterable[float]) -> Potential:
    return Potential("custom_samples", x=np.asarray(x, float), v=np.asarray(v, float))


def load_samples_csv(path) -> Potential:
    """Two-column CSV (x, V(x)) -> sampled potential."""
    try:
        data = np.loadtxt(path, delimiter=",", dtype=float)
    except Exception as exc:
        raise ConfigError(f"cannot read samples from {path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != 2:
        raise ConfigError("sample file must have exactly two columns: x, V(x)")
    return custom_samples(data[:, 0], data[:, 1])


# ----------------------------- config text ---------------------------------

_POTENTIAL_KEYS = {"kind", "depth", "width", "alpha", "sigma", "csv"}

_REQUIRED = {
    "square_well": {"depth", "width"},
    "gaussian_well": {"depth", "width"},
    "poschl_teller": {"depth", "width"},
    "delta_regularized": {"alpha", "sigma"},
    "custom_samples": {"csv"},
}


def parse_keyvalue_text(text: str) -> Dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment; blank lines ignored."""
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = line.split("=", 1)
        key = key.strip()
        val = val.strip()
        if not key or not val:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        out[key] = val
    return out


def potential_from_mapping(mapping: Dict[str, str], base_dir=None) -> Tuple[Potential, Dict[str, str]]:
    """Build a Potential from parsed config keys; returns it plus leftovers.

    Keys not belonging to the potential section are handed back untouched so
    the run-configuration layer can validate them strictly.
    """
    pot_items = {k: v for k, v in mapping.items() if k in _POTENTIAL_KEYS}
    rest = {k: v for k, v in mapping.items() if k not in _POTENTIAL_KEYS}
    if "kind" not in pot_items:
        raise ConfigError("missing required key 'kind'")
    kind = pot_items.pop("kind")
    if kind not in CATALOG_KINDS:
        raise ConfigError(f"unknown potential kind '{kind}'")
    needed = _REQUIRED[kind]
    missing = needed - set(pot_items)
    if missing:
        raise ConfigError(f"{kind} requires keys: {', '.join(sorted(missing))}")
    extra = set(pot_items) - needed
    if extra:
        raise ConfigError(
            f"keys not accepted by {kind}: {', '.join(sorted(extra))}"
        )
    if kind == "custom_samples":
        path = pot_items["csv"]
        if base_dir is not None:
            import os
            if not os.path.isabs(path):
                path = os.path.join(base_dir, path)
        return load_samples_csv(path), rest
    kwargs = {}
    for key, val in pot_items.items():
        try:
            kwargs[key] = float(val)
        except ValueError:
            raise ConfigError(f"key '{key}': cannot parse '{val}' as a number") from None
    return Potential(kind, **kwargs), rest
