"""Quantized displacement on a long chain.

On a 15-cell chain with the excitation launched from the center, two
pump cycles should displace the wavepacket by two cells regardless of
the exact period, while the spread grows with the time spent in
dispersive regions. The shift saturates near, but a little below, the
quantized value on a finite chain because some weight leaks into
non-pumping bands at the cycle corners.
"""

import numpy as np

from ricemele import ChainSpec, PumpProtocol
from ricemele.model import TWO_PI
from ricemele.spectrum import predict_optimal_period
from ricemele.sweeps import SweepSpec, run_mean_position


def main():
    chain = ChainSpec(30)  # 15 two-site cells
    template = PumpProtocol("experimental", TWO_PI * 1.5, TWO_PI * 8.0, 0.0, 1.0, 2)
    t_pred = predict_optimal_period(template)
    periods = np.geomspace(t_pred / 2, t_pred * 2, 9)

    spec = SweepSpec("mean_position", chain, template, {"period": periods}, jobs=2)
    result = run_mean_position(spec)

    print(f"predicted optimal period: {t_pred:.2f} us")
    print(f"ideal shift after {template.n_cycles} cycles: "
          f"{float(template.n_cycles):.1f} cells\n")
    print(" period    shift   spread")
    for period, (shift, spread) in zip(periods, result.values):
        print(f"  {period:6.2f}  {shift:6.3f}  {spread:7.3f}")

    shifts = result.values[:, 0]
    print(f"\nshift stays within [{shifts.min():.2f}, {shifts.max():.2f}] cells"
          " across a factor-4 period span; the spread rises monotonically"
          " because longer cycles give dispersion more time.")


if __name__ == "__main__":
    main()
