"""Uniform line grid, logarithmic half-line grid, and the transforms on them.

The continuous conventions realized here:

* Fourier transform  (Ff)(k) = (2 pi)^(-1/2) integral e^{-ikx} f(x) dx,
  inverted with the opposite phase.  The discrete version is unitary between
  the dx-weighted and dk-weighted inner products.
* Parity decomposition into even/odd parts, each stored on the half line with
  weight sqrt(2) so that the split is unitary.
* Log-radial transform on the half line: with u = ln x and
  g(u) = e^{u/2} h(e^u), the forward transform is the unitary Fourier
  transform in u.  The dilation generator acts as multiplication by the dual
  variable a, so dilating h by e^{tau} multiplies the transform by
  e^{i tau a}.

All momentum/dual arrays are kept in monotone (shifted) order; x = 0 and
k = 0 both sit at index n // 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ContractError


# ----------------------------- grids ---------------------------------------


@dataclass(frozen=True)
class LineGrid:
    """Uniform symmetric grid x_j = -x_max + j*dx, j = 0..n-1.

    Parameters
    ----------
    n : int
        Number of points; a power of two, at least 16.
    x_max : float
        Half width of the spatial box.  The rightmost stored point is
        x_max - dx; under the periodic identification used by the discrete
        transforms the left endpoint -x_max is its own mirror image.
    """

    n: int
    x_max: float

    def __post_init__(self):
        if self.n < 16 or (self.n & (self.n - 1)) != 0:
            raise ContractError("grid size must be a power of two, at least 16")
        if not self.x_max > 0:
            raise ContractError("x_max must be positive")

    @cached_property
    def dx(self) -> float:
        return 2.0 * self.x_max / self.n

    @cached_property
    def dk(self) -> float:
        return np.pi / self.x_max

    @cached_property
    def points(self) -> np.ndarray:
        return -self.x_max + self.dx * np.arange(self.n)

    @cached_property
    def momenta(self) -> np.ndarray:
        """Monotone momentum grid; k = 0 at index n // 2, spacing dk."""
        return 2.0 * np.pi * np.fft.fftshift(np.fft.fftfreq(self.n, d=self.dx))

    @cached_property
    def k_nyquist(self) -> float:
        return np.pi / self.dx

    def norm(self, f: np.ndarray) -> float:
        """dx-weighted l2 norm (discrete L2(R) norm)."""
        return float(np.sqrt(self.dx * np.sum(np.abs(f) ** 2, axis=0)))

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        return complex(self.dx * np.vdot(f, g))


@dataclass(frozen=True)
class LogGrid:
    """Uniform grid in u = ln x covering [u_min, u_max), for half-line data.

    The dual grid (conjugate to u) is in monotone order with spacing
    2 pi / (u_max - u_min).
    """

    m: int
    u_min: float
    u_max: float

    def __post_init__(self):
        if self.m < 16 or (self.m & (self.m - 1)) != 0:
            raise ContractError("log grid size must be a power of two, at least 16")
        if not self.u_max > self.u_min:
            raise ContractError("empty log-grid window")

    @cached_property
    def du(self) -> float:
        return (self.u_max - self.u_min) / self.m

    @cached_property
    def points(self) -> np.ndarray:
        return self.u_min + self.du * np.arange(self.m)

    @cached_property
    def radii(self) -> np.ndarray:
        """Log-spaced half-line points e^{u}."""
        return np.exp(self.points)

    @cached_property
    def duals(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftshift(np.fft.fftfreq(self.m, d=self.du))

    @cached_property
    def a_nyquist(self) -> float:
        return np.pi / self.du


DEFAULT_GRID = dict(n=2048, x_max=40.0)
DEFAULT_LOG_GRID = dict(m=4096, u_min=-16.0, u_max=8.0)


def default_grid() -> LineGrid:
    return LineGrid(**DEFAULT_GRID)


def default_log_grid() -> LogGrid:
    return LogGrid(**DEFAULT_LOG_GRID)


# ----------------------------- Fourier -------------------------------------


def fourier(grid: LineGrid, f: np.ndarray) -> np.ndarray:
    """Unitary Fourier transform onto grid.momenta (monotone order).

    Accepts a single vector of length n or a batch of column vectors (n, r).
    """
    _check_len(grid, f)
    spec = np.fft.fft(f, axis=0) * (grid.dx / np.sqrt(2.0 * np.pi))
    spec = np.fft.fftshift(spec, axes=0)
    phase = np.exp(1j * grid.momenta * grid.x_max)
    return spec * _col(phase, f)


def inverse_fourier(grid: LineGrid, fk: np.ndarray) -> np.ndarray:
    """Inverse of :func:`fourier`; input on grid.momenta, output on grid.points."""
    _check_len(grid, fk)
    phase = np.exp(-1j * grid.momenta * grid.x_max)
    spec = np.fft.ifftshift(fk * _col(phase, fk), axes=0)
    return np.fft.ifft(spec, axis=0) * (grid.n * grid.dk / np.sqrt(2.0 * np.pi))


def reflect(grid: LineGrid, f: np.ndarray) -> np.ndarray:
    """Samples of f(-x) under the periodic identification (index -j mod n)."""
    _check_len(grid, f)
    return np.roll(f[::-1, ...], 1, axis=0)


# ----------------------------- parity --------------------------------------


@dataclass(frozen=True)
class ParityVector:
    """Even/odd half-line data for one line vector.

    Both arrays have length n//2 + 1 and live on x = 0, dx, ..., x_max.
    Interior slots store sqrt(2) times the even/odd part so that the split is
    unitary; the x = 0 slot (index 0) belongs to the even sector with the odd
    sector forced to 0 there, and the last slot holds the self-paired far
    endpoint (the sample at -x_max), also even-only.
    """

    even: np.ndarray
    odd: np.ndarray

    def __post_init__(self):
        if self.even.shape != self.odd.shape:
            raise ContractError("even/odd parts must have matching shapes")

    @property
    def norm_sq_weights(self) -> None:  # pragma: no cover - documentation stub
        return None


def half_axis(grid: LineGrid) -> np.ndarray:
    """The half-line points 0, dx, ..., x_max carried by a ParityVector."""
    return grid.dx * np.arange(grid.n // 2 + 1)


def parity_split(grid: LineGrid, f: np.ndarray) -> ParityVector:
    """Split a line vector into unitary even/odd half-line parts."""
    _check_len(grid, f)
    fr = reflect(grid, f)
    ev = 0.5 * (f + fr)
    od = 0.5 * (f - fr)
    half = grid.n // 2
    rt2 = np.sqrt(2.0)

    even = np.empty((half + 1,) + f.shape[1:], dtype=complex)
    odd = np.zeros_like(even)
    even[0] = f[half]                     # x = 0, self-paired
    even[1:half] = rt2 * ev[half + 1:]    # x = dx .. x_max - dx
    odd[1:half] = rt2 * od[half + 1:]
    even[half] = f[0]                     # wrap point (sample at -x_max)
    return ParityVector(even=even, odd=odd)


def parity_join(grid: LineGrid, pv: ParityVector) -> np.ndarray:
    """Inverse of :func:`parity_split` (exact round trip)."""
    half = grid.n // 2
    if pv.even.shape[0] != half + 1:
        raise ContractError("parity data does not match this grid")
    rt2 = np.sqrt(2.0)
    f = np.empty((grid.n,) + pv.even.shape[1:], dtype=complex)
    f[half] = pv.even[0]
    f[0] = pv.even[half]
    ev = pv.even[1:half] / rt2
    od = pv.odd[1:half] / rt2
    f[half + 1:] = ev + od
    f[1:half] = (ev - od)[::-1]
    return f


def parity_norm(grid: LineGrid, pv: ParityVector) -> float:
    total = np.sum(np.abs(pv.even) ** 2) + np.sum(np.abs(pv.odd) ** 2)
    return float(np.sqrt(grid.dx * total))


# ----------------------------- log-radial transform ------------------------


def mellin(loggrid: LogGrid, h: np.ndarray) -> np.ndarray:
    """Unitary log-radial transform of half-line samples h(radii).

    The Jacobian weight e^{u/2} is applied internally, so the du-weighted
    norm of the result equals the L2(0, inf) norm of h.  Output is on
    loggrid.duals (monotone order).
    """
    if h.shape[0] != loggrid.m:
        raise ContractError("sample count does not match the log grid")
    g = h * _col(np.exp(0.5 * loggrid.points), h)
    spec = np.fft.fft(g, axis=0) * (loggrid.du / np.sqrt(2.0 * np.pi))
    spec = np.fft.fftshift(spec, axes=0)
    return spec * _col(np.exp(-1j * loggrid.duals * loggrid.u_min), h)


def inverse_mellin(loggrid: LogGrid, ga: np.ndarray) -> np.ndarray:
    """Inverse of :func:`mellin`; returns half-line samples on loggrid.radii."""
    if ga.shape[0] != loggrid.m:
        raise ContractError("sample count does not match the log grid")
    da = 2.0 * np.pi / (loggrid.m * loggrid.du)
    spec = np.fft.ifftshift(ga * _col(np.exp(1j * loggrid.duals * loggrid.u_min), ga), axes=0)
    g = np.fft.ifft(spec, axis=0) * (loggrid.m * da / np.sqrt(2.0 * np.pi))
    return g * _col(np.exp(-0.5 * loggrid.points), g)


def mellin_norm(loggrid: LogGrid, h: np.ndarray) -> float:
    """L2(0, inf) norm of half-line samples with the log-grid measure."""
    g = h * np.exp(0.5 * loggrid.points)
    return float(np.sqrt(loggrid.du * np.sum(np.abs(g) ** 2)))


# ----------------------------- helpers -------------------------------------


def _check_len(grid: LineGrid, f: np.ndarray) -> None:
    if f.shape[0] != grid.n:
        raise ContractError(
            f"vector length {f.shape[0]} does not match grid size {grid.n}"
        )


def _col(w: np.ndarray, like: np.ndarray) -> np.ndarray:
    """Reshape a 1-d weight so it broadcasts over column batches."""
    if like.ndim == 1:
        return w
    return w.reshape((-1,) + (1,) * (like.ndim - 1))
