"""Instantaneous spectra, excitation spectroscopy, and optimal-period tools."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.signal import find_peaks

from .model import TWO_PI, ChainSpec, ParameterPoint, bloch_band_width, build_hamiltonian, build_hamiltonians
from .protocols import PumpProtocol, sample_trajectory
from . import evolution


@dataclass(frozen=True)
class SpectrumTrack:
    times: np.ndarray
    eigenvalues: np.ndarray  # shape (len(times), n_sites), ascending rows


@dataclass(frozen=True)
class ExcitationSpectrum:
    detunings: np.ndarray
    response: np.ndarray
    probe_site: int
    linewidth: float


def lorentzian(x, gamma):
    """Unit-height Lorentzian with half width at half maximum gamma."""
    x = np.asarray(x, dtype=float)
    return gamma * gamma / (x * x + gamma * gamma)


def instantaneous_spectrum(
    spec: ChainSpec, protocol: PumpProtocol, n_times: int = 256
) -> SpectrumTrack:
    """Eigenvalues of the instantaneous Hamiltonian over one pump period."""
    if n_times < 2:
        raise ValueError("need at least 2 time samples")
    single = PumpProtocol(
        protocol.kind, protocol.j_max, protocol.delta0, protocol.delta_offset, protocol.period, 1
    )
    times = np.linspace(0.0, single.period, n_times)
    j1, j2, delta = sample_trajectory(single, times)
    h = build_hamiltonians(spec, j1, j2, delta)
    evals = np.linalg.eigvalsh(h)
    return SpectrumTrack(times=times, eigenvalues=evals)


def excitation_spectrum(
    spec: ChainSpec,
    point: ParameterPoint,
    probe_site: int,
    linewidth: float,
    detunings: np.ndarray,
) -> ExcitationSpectrum:
    """Overlap-weighted Lorentzian response of a laser probing one site.

    Each eigenstate |n> contributes |<n|probe>|^2 at detuning E_n, so the
    response integrates to pi * linewidth independently of the probe site.
    """
    if not 1 <= probe_site <= spec.n_sites:
        raise ValueError("probe_site out of range")
    if linewidth <= 0:
        raise ValueError("linewidth must be positive")
    detunings = np.asarray(detunings, dtype=float)
    w, v = np.linalg.eigh(build_hamiltonian(spec, point))
    weights = np.abs(v[probe_site - 1, :]) ** 2
    response = np.zeros_like(detunings)
    for energy, weight in zip(w, weights):
        response += weight * lorentzian(detunings - energy, linewidth)
    return ExcitationSpectrum(
        detunings=detunings, response=response, probe_site=probe_site, linewidth=linewidth
    )


def find_spectral_peaks(x: np.ndarray, y: np.ndarray, min_height_frac: float = 0.1) -> np.ndarray:
    """Positions of local maxima above a fraction of the global maximum."""
    y = np.asarray(y, dtype=float)
    idx, _ = find_peaks(y, height=min_height_frac * y.max())
    return np.asarray(x)[idx]


def max_band_width(protocol: PumpProtocol, n_times: int = 512) -> float:
    """Maximum Bloch band width along the protocol over one period.

    Dense scan followed by golden-section refinement of the bracketing
    interval; relative tolerance 1e-6 on the period coordinate.
    """
    period = protocol.period

    def width_at(t):
        j1, j2, delta = sample_trajectory(protocol, np.array([t % period]))
        return bloch_band_width(ParameterPoint(float(j1[0]), float(j2[0]), float(delta[0])))

    times = np.linspace(0.0, period, n_times, endpoint=False)
    j1, j2, delta = sample_trajectory(protocol, times)
    hi = np.sqrt(delta**2 + (j1 + j2) ** 2)
    lo = np.sqrt(delta**2 + (j1 - j2) ** 2)
    widths = hi - lo
    k = int(np.argmax(widths))
    if widths[k] <= 0.0:
        return 0.0
    # bracket the dense maximum with its periodic neighbors
    ta = times[k] - period / n_times
    tc = times[k] + period / n_times
    res = minimize_scalar(
        lambda t: -width_at(t),
        bracket=(ta, times[k], tc),
        method="golden",
        options={"xtol": 1e-6},
    )
    return max(float(-res.fun), float(widths[k]))


def predict_optimal_period(protocol: PumpProtocol, n_times: int = 512) -> float:
    """Dispersion estimate of the optimal pump period, 2*pi / max band width."""
    width = max_band_width(protocol, n_times)
    if width <= 0.0:
        raise ValueError("dispersionless protocol: no finite optimal period predicted")
    return TWO_PI / width


def pump_efficiency(record, spec: ChainSpec, destination_cell: int | None = None) -> float:
    """Population of a destination cell at the final time over total population.

    destination_cell defaults to the last cell, matching transfer_efficiency.
    """
    pops = evolution.cell_populations(record.final_state, spec)
    cell = spec.n_cells if destination_cell is None else destination_cell
    if not 1 <= cell <= spec.n_cells:
        raise ValueError("destination_cell out of range")
    return float(pops[cell - 1] / pops.sum())


def efficiency_vs_period(
    spec: ChainSpec,
    protocol_template: PumpProtocol,
    period_grid: np.ndarray,
    start_cell: int = 1,
    branch: str = "lower",
    dt_per_cycle: int = evolution.DEFAULT_STEPS_PER_CYCLE,
) -> np.ndarray:
    """Destination-cell efficiency after n_cycles for every period in the grid.

    The destination is start_cell advanced by one cell per cycle, clipped
    to the end of the chain.
    """
    destination = min(start_cell + protocol_template.n_cycles, spec.n_cells)
    effs = np.empty(len(period_grid))
    for i, period in enumerate(period_grid):
        protocol = PumpProtocol(
            protocol_template.kind,
            protocol_template.j_max,
            protocol_template.delta0,
            protocol_template.delta_offset,
            float(period),
            protocol_template.n_cycles,
        )
        psi0 = evolution.initial_dimer_state(
            spec, sample_trajectory(protocol, 0.0), start_cell, branch
        )
        cfg = evolution.EvolutionConfig(dt=protocol.period / dt_per_cycle, store_states=False)
        record = evolution.evolve(spec, protocol, psi0, cfg)
        effs[i] = pump_efficiency(record, spec, destination)
    return effs


def smooth_moving_average(x: np.ndarray, y: np.ndarray, window: float) -> np.ndarray:
    """Box average of y over all x within +-window/2 of each grid point."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    half = window / 2.0
    for i, xi in enumerate(x):
        mask = np.abs(x - xi) <= half
        out[i] = y[mask].mean()
    return out


def find_optimal_period(
    spec: ChainSpec,
    protocol_template: PumpProtocol,
    period_grid: np.ndarray,
    smoothing_window: float | None = None,
    start_cell: int = 1,
    branch: str = "lower",
) -> float:
    """Period of maximum smoothed pump efficiency over a sorted grid.

    Smoothing suppresses the fast efficiency oscillations whose frequency
    is set by delta0; the default window is one such oscillation period,
    2*pi/delta0. Ties resolve to the shorter period.
    """
    period_grid = np.asarray(period_grid, dtype=float)
    if len(period_grid) < 16:
        raise ValueError("period grid needs at least 16 points")
    if np.any(np.diff(period_grid) <= 0):
        raise ValueError("period grid must be strictly increasing")
    effs = efficiency_vs_period(spec, protocol_template, period_grid, start_cell, branch)
    if np.all(effs == 0.0):
        raise ValueError("all efficiencies vanish: degenerate protocol")
    if smoothing_window is None:
        if protocol_template.delta0 <= 0:
            raise ValueError("smoothing window required when delta0 = 0")
        smoothing_window = TWO_PI / protocol_template.delta0
    smoothed = smooth_moving_average(period_grid, effs, smoothing_window)
    return float(period_grid[int(np.argmax(smoothed))])


def write_spectrum_csv(track: SpectrumTrack, path: str) -> None:
    n_levels = track.eigenvalues.shape[1]
    header = "# columns: time_us," + ",".join(f"e{k + 1}" for k in range(n_levels))
    lines = [header]
    for t, row in zip(track.times, track.eigenvalues):
        lines.append(",".join([repr(float(t))] + [repr(float(v)) for v in row]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_excitation_csv(spectrum: ExcitationSpectrum, path: str) -> None:
    lines = [
        f"# probe_site: {spectrum.probe_site}",
        f"# linewidth_rad_per_us: {spectrum.linewidth!r}",
        "# columns: detuning,response",
    ]
    for d, r in zip(spectrum.detunings, spectrum.response):
        lines.append(f"{float(d)!r},{float(r)!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def finite_band_spread(spec: ChainSpec, point: ParameterPoint) -> float:
    """Spread of the lower band of a finite chain, for Bloch cross-checks.

    Takes the lowest floor(N/2) eigenvalues and drops trailing mid-gap
    states, detected when the gap to the previous level exceeds 3 times
    the median level spacing inside the band.
    """
    evals = np.linalg.eigvalsh(build_hamiltonian(spec, point))
    band = evals[: spec.n_sites // 2]
    while len(band) > 2:
        gaps = np.diff(band)
        if gaps[-1] > 3.0 * np.median(gaps[:-1]):
            band = band[:-1]
        else:
            break
    return float(band[-1] - band[0])
