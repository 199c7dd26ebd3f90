"""Rice-Mele chain model: cell partitions, Hamiltonian assembly, band width.

Units: all couplings and detunings are angular frequencies in rad/us,
time is in microseconds, hbar = 1. Configuration files quote ordinary
frequencies in MHz; multiply by 2*pi on ingest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi


def default_cells(n_sites: int) -> tuple[tuple[int, ...], ...]:
    """Partition sites 1..N into dimer cells {1,2},{3,4},...; odd N ends in a singleton."""
    cells = []
    s = 1
    while s <= n_sites:
        cells.append((s, s + 1) if s + 1 <= n_sites else (s,))
        s += 2
    return tuple(cells)


@dataclass(frozen=True)
class ChainSpec:
    """Open chain of n_sites sites grouped into ordered unit cells.

    delta_parity fixes the sign pattern of the on-site imbalance:
    +1 puts +delta on odd sites, -1 flips the whole pattern.
    """

    n_sites: int
    cells: tuple[tuple[int, ...], ...] = ()
    delta_parity: int = +1

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be positive")
        if self.delta_parity not in (+1, -1):
            raise ValueError("delta_parity must be +1 or -1")
        cells = self.cells or default_cells(self.n_sites)
        object.__setattr__(self, "cells", tuple(tuple(c) for c in cells))
        self._validate_cells()

    def _validate_cells(self):
        flat = [s for c in self.cells for s in c]
        if flat != list(range(1, self.n_sites + 1)):
            raise ValueError("cells must be contiguous, disjoint, ordered, and cover 1..N")
        for i, c in enumerate(self.cells):
            if len(c) not in (1, 2):
                raise ValueError("cells must have 1 or 2 sites")
            if len(c) == 1 and i != len(self.cells) - 1:
                raise ValueError("only the last cell may be a singleton")

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def cell_of_site(self, site: int) -> int:
        """1-based cell index containing a 1-based site index."""
        for i, c in enumerate(self.cells, start=1):
            if site in c:
                return i
        raise ValueError(f"site {site} out of range")

    def intra_bonds(self) -> np.ndarray:
        """Boolean mask over bonds (1..N-1); True where bond (i, i+1) is intra-cell."""
        first = {c[0] for c in self.cells if len(c) == 2}
        return np.array([b in first for b in range(1, self.n_sites)], dtype=bool)

    def site_signs(self) -> np.ndarray:
        """Per-site sign of delta on the diagonal."""
        signs = np.where(np.arange(1, self.n_sites + 1) % 2 == 1, 1.0, -1.0)
        return self.delta_parity * signs


@dataclass(frozen=True)
class ParameterPoint:
    """One point (J1, J2, delta) of the pump trajectory, rad/us."""

    j1: float
    j2: float
    delta: float

    def __post_init__(self):
        if self.j1 < 0 or self.j2 < 0:
            raise ValueError("couplings must be non-negative")


def build_hamiltonian(spec: ChainSpec, point: ParameterPoint) -> np.ndarray:
    """Dense real symmetric tridiagonal Hamiltonian for one parameter point.

    Diagonal alternates +delta/-delta by site parity; the bond (i, i+1)
    carries -J1 when intra-cell and -J2 when inter-cell.
    """
    n = spec.n_sites
    h = np.zeros((n, n))
    idx = np.arange(n)
    h[idx, idx] = point.delta * spec.site_signs()
    if n > 1:
        off = np.where(spec.intra_bonds(), -point.j1, -point.j2)
        h[idx[:-1], idx[1:]] = off
        h[idx[1:], idx[:-1]] = off
    return h


def build_hamiltonians(spec: ChainSpec, j1, j2, delta) -> np.ndarray:
    """Stack of Hamiltonians for arrays of trajectory samples, shape (M, N, N)."""
    j1 = np.atleast_1d(np.asarray(j1, dtype=float))
    j2 = np.atleast_1d(np.asarray(j2, dtype=float))
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    m = max(j1.size, j2.size, delta.size)
    j1, j2, delta = (np.broadcast_to(a, (m,)) for a in (j1, j2, delta))
    n = spec.n_sites
    h = np.zeros((m, n, n))
    idx = np.arange(n)
    h[:, idx, idx] = delta[:, None] * spec.site_signs()[None, :]
    if n > 1:
        intra = spec.intra_bonds()
        off = np.where(intra[None, :], -j1[:, None], -j2[:, None])
        h[:, idx[:-1], idx[1:]] = off
        h[:, idx[1:], idx[:-1]] = off
    return h


def bloch_band_width(point: ParameterPoint) -> float:
    """Width of one Bloch band of the infinite chain at a parameter point.

    The band energies are +-sqrt(delta^2 + |J1 + J2 e^{ik}|^2), so the
    width is sqrt(delta^2 + (J1+J2)^2) - sqrt(delta^2 + (J1-J2)^2).
    """
    d2 = point.delta * point.delta
    hi = np.sqrt(d2 + (point.j1 + point.j2) ** 2)
    lo = np.sqrt(d2 + (point.j1 - point.j2) ** 2)
    return float(hi - lo)
