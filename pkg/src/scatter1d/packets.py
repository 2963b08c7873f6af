"""Gaussian wave packets and orthonormal test subspaces.

Packets are the probes for every operator-level diagnostic: they live well
inside the box, carry momentum away from zero, and can be band-limited so
that subsequent transforms never touch poorly resolved modes.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

import numpy as np

from .errors import ContractError, RangeError
from .grids import LineGrid, fourier, inverse_fourier, reflect


def gaussian_packet(grid: LineGrid, x0: float, k0: float, s: float) -> np.ndarray:
    """Normalized packet exp(ik0 x) exp(-(x-x0)^2 / 2 s^2), unit L2 norm."""
    if s <= 0:
        raise ContractError("packet width must be positive")
    x = grid.points
    f = np.exp(1j * k0 * x - 0.5 * ((x - x0) / s) ** 2).astype(complex)
    nrm = grid.norm(f)
    if nrm == 0.0:
        raise RangeError("packet vanished on the grid; check x0 against x_max")
    return f / nrm


def band_limit(grid: LineGrid, f: np.ndarray, k_low: float, k_high: float) -> np.ndarray:
    """Project onto Fourier modes with k_low <= |k| <= k_high."""
    fh = fourier(grid, f)
    k = grid.momenta
    mask = (np.abs(k) >= k_low) & (np.abs(k) <= k_high)
    return inverse_fourier(grid, fh * mask)


def packet_family(
    grid: LineGrid,
    count: int,
    seed: int,
    k_range=(0.5, 4.0),
    width_range=(1.5, 4.0),
    x0_range=(-8.0, 8.0),
    parity_mix: bool = True,
) -> List[np.ndarray]:
    """A reproducible batch of normalized packets with varied parameters.

    With ``parity_mix`` every third packet is symmetrized or antisymmetrized
    so both parity sectors are represented.
    """
    rng = np.random.default_rng(seed)
    out: List[np.ndarray] = []
    for i in range(count):
        k0 = rng.uniform(*k_range) * rng.choice([-1.0, 1.0])
        s = rng.uniform(*width_range)
        x0 = rng.uniform(*x0_range)
        f = gaussian_packet(grid, x0, k0, s)
        if parity_mix and i % 3 == 1:
            g = f + reflect(grid, f)
            f = g / grid.norm(g)
        elif parity_mix and i % 3 == 2:
            g = f - reflect(grid, f)
            nrm = grid.norm(g)
            if nrm > 1e-12:
                f = g / nrm
        out.append(f)
    return out


def dilation_safe_packets(grid, log_grid, count: int, seed: int) -> List[np.ndarray]:
    """Packets engineered so both Fourier and log-radial pipelines resolve them.

    Constraints enforced per draw:

    * carrier momentum inside [0.05, 0.8] of the grid Nyquist,
    * momentum spread 1/s small against the carrier (s >= 4.2/|k0|),
    * center x0 = 4.5 s away from the origin so the origin value is ~1e-9,
    * the dilation-frequency content x0*k0 + spread stays under 0.82 of the
      log-grid Nyquist so nothing aliases in the Mellin direction.
    """
    rng = np.random.default_rng(seed)
    k_nyq = grid.k_nyquist
    a_budget = 0.82 * log_grid.a_nyquist
    out: List[np.ndarray] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 200 * count:
            raise RangeError("could not design enough dilation-safe packets")
        k0 = rng.uniform(0.05, 0.8) * k_nyq * rng.choice([-1.0, 1.0])
        # width floor: carrier 6.5 sigma away from k = 0, tails 6 sigma under
        # the momentum Nyquist, and a couple of grid cells spatially
        s_min = max(6.5 / abs(k0), 2.5 * grid.dx)
        headroom = 0.95 * k_nyq - abs(k0)
        if headroom <= 0:
            continue
        s_min = max(s_min, 6.0 / headroom)
        s = s_min * rng.uniform(1.0, 1.4)
        x0 = 4.5 * s * rng.choice([-1.0, 1.0]) * rng.uniform(1.0, 1.3)
        # a-content of the packet ~ |x0 k0| + a few widths of joint spread
        a_content = abs(x0 * k0) + 6.0 * (abs(x0) / s + abs(k0) * s)
        if a_content > a_budget:
            continue
        if abs(x0) + 6.0 * s > 0.9 * grid.x_max:
            continue
        f = gaussian_packet(grid, x0, k0, s)
        mode = len(out) % 3
        if mode == 1:
            g = f + reflect(grid, f)
            f = g / grid.norm(g)
        elif mode == 2:
            g = f - reflect(grid, f)
            f = g / grid.norm(g)
        out.append(f)
    return out


def orthonormal_basis(grid: LineGrid, vectors: Sequence[np.ndarray], drop_tol: float = 1e-8):
    """Symmetric (Loewdin) orthonormalization of a packet collection.

    Returns an (n, r) array whose columns are orthonormal in the dx-weighted
    inner product; directions with Gram eigenvalue below ``drop_tol`` times
    the largest are discarded.
    """
    A = np.column_stack([np.asarray(v, complex) for v in vectors])
    G = (A.conj().T @ A) * grid.dx
    evals, evecs = np.linalg.eigh(G)
    keep = evals > drop_tol * evals[-1]
    if not np.any(keep):
        raise ContractError("packet collection is numerically degenerate")
    W = evecs[:, keep] / np.sqrt(evals[keep])
    return A @ W
