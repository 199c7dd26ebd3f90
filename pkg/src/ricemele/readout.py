"""State-selective field-ionization time-of-flight model and unmixing.

A rising field ramp ionizes higher-lying states earlier, so each basis
state produces an arrival-time distribution centered where the ramp
crosses its classical ionization threshold. Composite traces are
weighted sums of these basis traces; populations are recovered by
non-negative least squares.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

# E_h / (e a0) in V/cm
ATOMIC_FIELD_V_PER_CM = 5.142e9


def classical_ionization_field(n_eff: float) -> float:
    """Classical ionization threshold, (E_h/(e a0)) / (16 n_eff^4), V/cm."""
    if n_eff <= 1:
        raise ValueError("n_eff must exceed 1")
    return ATOMIC_FIELD_V_PER_CM / (16.0 * n_eff**4)


@dataclass(frozen=True)
class IonizationModel:
    """Piecewise-linear field ramp with a Gaussian arrival-time kernel."""

    ramp_times: np.ndarray  # us, strictly increasing
    ramp_fields: np.ndarray  # V/cm, strictly increasing
    sigma_t: float  # us
    t0: float  # us, flight-time offset

    def __post_init__(self):
        times = np.asarray(self.ramp_times, dtype=float)
        fields = np.asarray(self.ramp_fields, dtype=float)
        object.__setattr__(self, "ramp_times", times)
        object.__setattr__(self, "ramp_fields", fields)
        if times.ndim != 1 or times.shape != fields.shape or len(times) < 2:
            raise ValueError("ramp needs matching 1-D time and field samples")
        if np.any(np.diff(times) <= 0) or np.any(np.diff(fields) <= 0):
            raise ValueError("ramp must be strictly increasing")
        if self.sigma_t <= 0:
            raise ValueError("sigma_t must be positive")

    def field_at(self, t):
        return np.interp(t, self.ramp_times, self.ramp_fields)

    def time_of_field(self, field: float) -> float:
        """Inverse of the ramp; errors when the field is never reached."""
        if field > self.ramp_fields[-1]:
            raise ValueError(
                f"field {field:.3g} V/cm exceeds the ramp maximum "
                f"{self.ramp_fields[-1]:.3g} V/cm: state never ionizes"
            )
        if field < self.ramp_fields[0]:
            raise ValueError("field below the start of the ramp")
        return float(np.interp(field, self.ramp_fields, self.ramp_times))


@dataclass(frozen=True)
class TofTrace:
    times: np.ndarray
    current: np.ndarray
    area_normalized: bool = False

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        current = np.asarray(self.current, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "current", current)
        if times.shape != current.shape or times.ndim != 1:
            raise ValueError("times and current must be matching 1-D arrays")
        if np.any(current < 0):
            raise ValueError("current must be non-negative")
        if self.area_normalized:
            area = np.trapezoid(current, times)
            if abs(area - 1.0) > 1e-9:
                raise ValueError(f"trace flagged normalized but area = {area}")


@dataclass(frozen=True)
class BasisSet:
    labels: tuple
    n_eff: tuple
    times: np.ndarray
    traces: np.ndarray  # shape (n_states, len(times))

    def __post_init__(self):
        if self.traces.shape != (len(self.labels), len(self.times)):
            raise ValueError("traces must be shaped (n_states, n_times)")
        if len(self.labels) != len(self.n_eff):
            raise ValueError("labels and n_eff must pair up")


def basis_trace(n_eff: float, model: IonizationModel, grid: np.ndarray) -> TofTrace:
    """Arrival-time distribution of one state: a normalized Gaussian at
    t0 plus the ramp time reaching that state's ionization threshold."""
    grid = np.asarray(grid, dtype=float)
    center = model.t0 + model.time_of_field(classical_ionization_field(n_eff))
    profile = np.exp(-0.5 * ((grid - center) / model.sigma_t) ** 2)
    area = np.trapezoid(profile, grid)
    if area == 0.0:
        raise ValueError("grid does not cover the arrival peak")
    return TofTrace(times=grid, current=profile / area, area_normalized=True)


def make_basis(labels, n_eff, model: IonizationModel, grid: np.ndarray) -> BasisSet:
    traces = np.stack([basis_trace(n, model, grid).current for n in n_eff])
    return BasisSet(labels=tuple(labels), n_eff=tuple(float(n) for n in n_eff),
                    times=np.asarray(grid, dtype=float), traces=traces)


def synthesize_trace(
    weights, basis: BasisSet, noise_amplitude: float = 0.0, seed: int | None = None
) -> TofTrace:
    """Weighted sum of basis traces plus seeded Gaussian noise, clipped at 0."""
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(basis.labels),):
        raise ValueError("one weight per basis state required")
    if np.any(weights < 0):
        raise ValueError("weights must be non-negative")
    if abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError("weights must sum to 1")
    current = weights @ basis.traces
    if noise_amplitude > 0.0:
        rng = np.random.default_rng(seed)
        scale = noise_amplitude * float(np.max(basis.traces))
        current = current + rng.normal(0.0, scale, size=current.shape)
    current = np.clip(current, 0.0, None)
    return TofTrace(times=basis.times, current=current, area_normalized=False)


def decompose_trace(
    trace: TofTrace, basis: BasisSet, normalize: bool = False
) -> tuple:
    """Non-negative least squares unmixing of a composite trace.

    Returns (weights, residual_norm). The NNLS solution satisfies the
    KKT conditions of min ||A w - y||^2 with w >= 0. With normalize,
    weights are rescaled to sum to 1 after the fit.
    """
    if trace.times.shape != basis.times.shape or not np.allclose(
        trace.times, basis.times, rtol=0.0, atol=1e-12
    ):
        raise ValueError("trace and basis must share one time grid")
    a = basis.traces.T
    rank = np.linalg.matrix_rank(a)
    if rank < a.shape[1]:
        cond = np.linalg.cond(a)
        warnings.warn(
            f"basis is rank-deficient (rank {rank} < {a.shape[1]}, "
            f"condition estimate {cond:.3g}); weights may not be unique",
            RuntimeWarning,
            stacklevel=2,
        )
    weights, residual = nnls(a, trace.current)
    if normalize:
        total = weights.sum()
        if total > 0:
            weights = weights / total
    return weights, float(residual)


def write_trace_csv(trace: TofTrace, path: str) -> None:
    lines = ["time_us,current"]
    lines.extend(f"{float(t)!r},{float(c)!r}" for t, c in zip(trace.times, trace.current))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trace_csv(path: str) -> TofTrace:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    return TofTrace(times=data[:, 0], current=data[:, 1])


def write_basis_csv(basis: BasisSet, path: str) -> None:
    header = "time_us," + ",".join(basis.labels)
    lines = [header]
    for i, t in enumerate(basis.times):
        row = [repr(float(t))] + [repr(float(v)) for v in basis.traces[:, i]]
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
