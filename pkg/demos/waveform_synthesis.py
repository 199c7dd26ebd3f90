"""Programming the rf chain: tones, calibration, and quantization.

One arbitrary-waveform channel drives every bond of the synthetic
chain at once, so the buffer is a sum of tones, one per transition,
each programmed at half the transition frequency for the doubler in
the rf chain. The coupling achieved per volt is calibrated separately
for each bond; back-solving those coefficients for equal couplings on all
five bonds gives a specific amplitude recipe. The buffer is integer
quantized, and a full-scale tone should sit within 1 dB of the
textbook 6.02 b + 1.76 quantization SNR.
"""

import pathlib

import numpy as np

from ricemele import defaults
from ricemele.model import TWO_PI
from ricemele.rfwave import (
    ToneSchedule,
    required_programmed_amplitude,
    spectral_purity_table,
    synthesize_waveform,
    write_waveform_binary,
)


def main():
    # single full-scale tone: quantization SNR check
    tone = ToneSchedule((1, 2), 21.7003, TWO_PI * 20.0, 0.0, TWO_PI * 20.0, 0.0)
    buffer = synthesize_waveform([tone], 0.05, 50000.0, 10)
    codes = buffer.samples.astype(float)
    t = np.arange(len(codes)) / buffer.sample_rate
    ideal = buffer.normalization * np.cos(2 * np.pi * (tone.carrier / 2) * t)
    snr = 10 * np.log10(np.mean(ideal**2) / np.mean((codes - ideal) ** 2))
    print(f"10-bit full-scale tone: SNR {snr:.1f} dB"
          f" (theory {6.02 * 10 + 1.76:.1f} dB)")

    # equal couplings on all five bonds of a six-state ladder
    omega = TWO_PI * 1.0
    fractions = defaults.EQUAL_COUPLING_AMPLITUDES
    tones = []
    print("\nbond  carrier/MHz  alpha/(rad/us/V^2)  programmed amplitude")
    for k, (carrier, fraction) in enumerate(
        zip(defaults.WAVEFORM["carriers_mhz"], fractions)
    ):
        alpha = omega / fraction**2
        amplitude = required_programmed_amplitude(omega, alpha)
        tones.append(ToneSchedule((k + 1, k + 2), carrier, omega, 0.0, alpha, 0.0))
        print(f"  {k + 1}-{k + 2}  {carrier:10.0f}  {alpha:18.2f}  {amplitude:10.2f}")
    print(f"amplitudes sum to {sum(fractions):.2f}: the recipe exactly fills"
          " full scale")

    composite = synthesize_waveform(
        tones,
        defaults.WAVEFORM["duration"],
        defaults.WAVEFORM["sample_rate"],
        defaults.WAVEFORM["bits"],
    )
    print(f"\ncomposite buffer: {len(composite.samples)} samples,"
          f" peak code {int(np.max(np.abs(composite.samples)))}")

    # strongest intermodulation products of the first two tones
    print("\nspectral purity of the leading tone pair:")
    for row in spectral_purity_table(tones[:2], defaults.WAVEFORM["duration"]):
        print(f"  {row['kind']:<10} at {row['frequency_mhz']:9.2f} MHz,"
              f" relative power {row['relative_power']:.3e}")

    out = pathlib.Path("demo_out")
    out.mkdir(exist_ok=True)
    path = out / "equal_coupling.bin"
    write_waveform_binary(composite, str(path))
    print(f"\nwrote {path}")


if __name__ == "__main__":
    main()
