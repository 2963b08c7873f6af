"""Potential-independent operator calculus on the line.

Three families act here: multipliers in the momentum basis (functions of the
free Hamiltonian), multipliers in the log-radial dual basis per parity sector
(functions of the dilation generator A), and the sign operators built from
them.  The central object is the unitary

    R(A) = -sign(x) sign(p),

whose parity-sector multipliers are -tanh(pi a) -/+ i sech(pi a), and the
averaging operator T = (1 - R(A))/2 = (1 + sign(x)sign(p))/2, which keeps the
part of a wave that sits on the side it travels toward.  T has two
independent realizations (Fourier sign multipliers vs the log-radial route);
their agreement is a strong end-to-end check of all conventions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .errors import ContractError
from .grids import (
    LineGrid,
    LogGrid,
    _col,
    fourier,
    inverse_fourier,
    inverse_mellin,
    mellin,
    reflect,
)

ArrayOrFunc = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]


# ----------------------------- symbols -------------------------------------


@dataclass(frozen=True)
class SymbolPair:
    """The even/odd multipliers of R(A) sampled on a dual grid."""

    a: np.ndarray
    r_even: np.ndarray
    r_odd: np.ndarray

    def check(self, tol: float = 1e-12) -> None:
        """Unimodularity and the product identity r_even * r_odd = 1."""
        if np.max(np.abs(np.abs(self.r_even) - 1.0)) > tol:
            raise ContractError("even symbol is not unimodular")
        if np.max(np.abs(self.r_even * self.r_odd - 1.0)) > tol:
            raise ContractError("symbol product identity violated")


def r_symbols(a) -> SymbolPair:
    """Evaluate the sector multipliers -tanh(pi a) -/+ i sech(pi a)."""
    a = np.asarray(a, dtype=float)
    th = -np.tanh(np.pi * a)
    # overflow-safe sech for the large arguments of wide dual grids
    e = np.exp(-np.abs(np.pi * a))
    sech = 2.0 * e / (1.0 + e * e)
    return SymbolPair(a=a, r_even=th - 1j * sech, r_odd=th + 1j * sech)


def _as_samples(phi: ArrayOrFunc, a: np.ndarray) -> np.ndarray:
    vals = phi(a) if callable(phi) else phi
    vals = np.asarray(vals)
    if vals.shape != a.shape:
        raise ContractError("symbol samples do not match the dual grid")
    return vals.astype(complex)


# ----------------------------- Fourier-side operators ----------------------


def hilbert_transform(grid: LineGrid, f: np.ndarray) -> np.ndarray:
    """Multiplication by -i sign(k) in the momentum basis."""
    fh = fourier(grid, f)
    return inverse_fourier(grid, fh * _col(-1j * np.sign(grid.momenta), fh))


def apply_T_fourier(grid: LineGrid, f: np.ndarray) -> np.ndarray:
    """T f = (f + i sigma Hf)/2 with sigma = sign(x), sign(0) = 0."""
    hf = hilbert_transform(grid, f)
    sigma = np.sign(grid.points)
    return 0.5 * (f + 1j * _col(sigma, f) * hf)


def function_of_H0(grid: LineGrid, f: np.ndarray, phi) -> np.ndarray:
    """Apply phi(H0) as the momentum multiplier phi(k^2)."""
    lam = grid.momenta ** 2
    w = np.asarray(phi(lam) if callable(phi) else phi).astype(complex)
    return inverse_fourier(grid, fourier(grid, f) * _col(w, f))


def reflect_momentum(fk: np.ndarray) -> np.ndarray:
    """Map samples on the monotone momentum grid to their values at -k."""
    return np.roll(fk[::-1, ...], 1, axis=0)


def apply_free_smatrix(
    grid: LineGrid,
    f: np.ndarray,
    t,
    r_left,
    r_right,
    k_floor: float = 1e-3,
) -> np.ndarray:
    """Apply S(H0) from per-momentum amplitudes t(k), r(k), k = |momentum|.

    Channel layout follows the plane-wave S-matrix [[t, r_left], [r_right, t]]
    in the order (+k, -k): the +k output couples r_left to the -k input.
    Amplitudes are evaluated at max(|k|, k_floor); the k = 0 grid mode is
    graded by continuity rather than excluded.
    """
    fh = fourier(grid, f)
    kk = np.maximum(np.abs(grid.momenta), k_floor)
    tv = np.asarray(t(kk), dtype=complex)
    rv = np.where(grid.momenta >= 0,
                  np.asarray(r_left(kk), dtype=complex),
                  np.asarray(r_right(kk), dtype=complex))
    out = fh * _col(tv, fh) + reflect_momentum(fh) * _col(rv, fh)
    return inverse_fourier(grid, out)


# ----------------------------- log-radial pipeline -------------------------


@lru_cache(maxsize=6)
def _resampling(grid: LineGrid, loggrid: LogGrid):
    """Band-limited interpolation matrices between the two grids.

    M1 evaluates a line-grid function at the log-grid radii (rows beyond
    x_max are zero: functions are assumed dead at the box edge).  M2
    evaluates a log-grid function, band-limited in u, at u = ln(j dx) for
    j = 1..n/2; the output rows correspond to the half-line readout points.
    """
    r = loggrid.radii
    x = grid.points
    M1 = np.zeros((loggrid.m, grid.n))
    inside = r < grid.x_max
    M1[inside] = np.sinc((r[inside, None] - x[None, :]) / grid.dx)
    half = grid.n // 2
    xs = grid.dx * np.arange(1, half + 1)
    M2 = np.sinc((np.log(xs)[:, None] - loggrid.points[None, :]) / loggrid.du)
    return M1, M2, xs


def function_of_A(
    grid: LineGrid,
    loggrid: LogGrid,
    f: np.ndarray,
    phi_even: ArrayOrFunc,
    phi_odd: ArrayOrFunc,
) -> np.ndarray:
    """Apply phi(A), acting as multiplication by phi_{e/o}(a) per sector.

    Route: resample both half-lines onto the log grid, transform, multiply,
    transform back, and resample onto the uniform grid.  The origin slot of
    the output is set to 0 (dilation-covariant operators cannot see x = 0);
    feed functions with negligible origin mass.
    """
    M1, M2, xs = _resampling(grid, loggrid)
    f = np.asarray(f, dtype=complex)
    rt2inv = 1.0 / np.sqrt(2.0)

    fp = M1 @ f
    fm = M1 @ reflect(grid, f)
    he = (fp + fm) * rt2inv
    ho = (fp - fm) * rt2inv

    a = loggrid.duals
    ge = mellin(loggrid, he) * _col(_as_samples(phi_even, a), he)
    go = mellin(loggrid, ho) * _col(_as_samples(phi_odd, a), ho)

    w = np.exp(0.5 * loggrid.points)
    Ge = inverse_mellin(loggrid, ge) * _col(w, ge)
    Go = inverse_mellin(loggrid, go) * _col(w, go)

    scale = 1.0 / (np.sqrt(2.0) * np.sqrt(xs))
    ve = (M2 @ Ge) * _col(scale, Ge)
    vo = (M2 @ Go) * _col(scale, Go)

    half = grid.n // 2
    out = np.zeros_like(f)
    out[half + 1:] = (ve + vo)[: half - 1]
    out[1:half] = (ve - vo)[: half - 1][::-1]
    out[0] = ve[half - 1] - vo[half - 1]
    return out


def apply_R(grid: LineGrid, loggrid: LogGrid, f: np.ndarray) -> np.ndarray:
    """R(A) f through the log-radial route."""
    pair = r_symbols(loggrid.duals)
    return function_of_A(grid, loggrid, f, pair.r_even, pair.r_odd)


def apply_T_mellin(grid: LineGrid, loggrid: LogGrid, f: np.ndarray) -> np.ndarray:
    """T f = (f - R(A) f)/2 through the log-radial route.

    The origin slot comes out as f(0)/2, matching the sign(0) = 0 convention
    of the Fourier realization.
    """
    return 0.5 * (f - apply_R(grid, loggrid, f))


# ----------------------------- dense operators -----------------------------

_BASES = ("position", "momentum")


@dataclass
class OperatorMatrix:
    """A dense operator on line-grid sample vectors, with basis bookkeeping.

    ``entries`` acts by plain matrix multiplication on sample vectors (all
    quadrature weights are baked in at construction).  ``basis`` records the
    representation; ``provenance`` a human-readable construction note.
    """

    entries: np.ndarray
    basis: str
    provenance: str

    def __post_init__(self):
        if self.basis not in _BASES:
            raise ContractError(f"unknown basis tag '{self.basis}'")
        e = np.asarray(self.entries)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ContractError("operator entries must form a square matrix")

    def apply(self, f: np.ndarray) -> np.ndarray:
        return self.entries @ f

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.entries))

    def in_basis(self, grid: LineGrid, basis: str) -> "OperatorMatrix":
        if basis not in _BASES:
            raise ContractError(f"unknown basis tag '{basis}'")
        if basis == self.basis:
            return self
        A = self.entries
        if basis == "momentum":
            B = fourier(grid, A)
            B = fourier(grid, B.conj().T).conj().T
        else:
            B = inverse_fourier(grid, A)
            B = inverse_fourier(grid, B.conj().T).conj().T
        return OperatorMatrix(entries=B, basis=basis,
                              provenance=self.provenance + f" -> {basis} basis")
