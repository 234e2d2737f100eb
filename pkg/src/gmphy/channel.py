"""Noise and fading models applied to sampled waveforms.

Noise is calibrated in Eb/N0 terms for unit-envelope symbols: at R samples
per symbol and ell_sym bits per symbol, the per-sample complex noise
variance is R / (ell_sym * 10^(EbN0_dB/10)).  Non-constant-envelope
variants pass their measured mean sample power instead of relying on the
unit-envelope assumption.

Fading realizations are tap delay lines with zero-mean complex Gaussian
gains.  The tap power profile always sums to one, so fading reshuffles
energy between realizations without changing its average.  Delays live on
the chip grid and are quantized to the sample grid when applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .waveform import SampledWaveform

__all__ = [
    "ChannelRealization",
    "NoiseSpec",
    "awgn",
    "draw_flat",
    "draw_selective",
    "apply",
]


@dataclass(frozen=True)
class NoiseSpec:
    """Noise level as Eb/N0 in dB plus the bits-per-symbol that tie bit
    energy to symbol energy.  mean_power is the transmit-side mean square
    sample value the calibration references (1 for unit-envelope symbols);
    it is deliberately not measured from the noisy input so that fading
    ahead of the noise source is not silently normalized away."""

    eb_n0_db: float
    ell_sym: int
    mean_power: float = 1.0

    def __post_init__(self):
        if self.ell_sym < 1:
            raise ConfigError("ell_sym must be at least 1")
        if not self.mean_power > 0:
            raise ConfigError("mean_power must be positive")
        if math.isnan(self.eb_n0_db):
            raise ConfigError("eb_n0_db must not be NaN")

    def noise_variance(self, rate: int) -> float:
        """Per-sample complex noise variance at the given sample rate."""
        return self.mean_power * rate / (self.ell_sym * 10 ** (self.eb_n0_db / 10))


@dataclass(frozen=True)
class ChannelRealization:
    """One fading draw: complex tap gains, their chip delays, and the
    ensemble power profile the draw came from."""

    gains: tuple
    delays_chips: tuple
    tap_powers: tuple
    rms_spread_chips: float = 0.0

    def __post_init__(self):
        if not (len(self.gains) == len(self.delays_chips) == len(self.tap_powers)):
            raise ConfigError("taps, delays, and powers must align")
        if abs(sum(self.tap_powers) - 1.0) > 1e-9:
            raise ConfigError("tap power profile must sum to 1")


def awgn(wave: SampledWaveform, spec: NoiseSpec, seed=None) -> SampledWaveform:
    """Add circularly symmetric complex Gaussian noise.

    An infinite Eb/N0 returns the input samples unchanged.
    """
    var = spec.noise_variance(wave.rate)
    if var == 0.0:
        return SampledWaveform(wave.samples.copy(), wave.rate)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(2 * len(wave)).view(complex)
    return SampledWaveform(wave.samples + np.sqrt(var / 2) * z, wave.rate)


def draw_flat(seed=None) -> ChannelRealization:
    """Single-tap Rayleigh fade at delay zero with unit mean power."""
    rng = np.random.default_rng(seed)
    g = complex(rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2)
    return ChannelRealization((g,), (0,), (1.0,), 0.0)


def draw_selective(n_taps: int, rms_spread_chips: float, seed=None) -> ChannelRealization:
    """Chip-spaced exponential power-delay profile with Rayleigh taps.

    Tap i sits at delay i chips with ensemble power proportional to
    exp(-i / rms_spread_chips), normalized to unit total.  The stored rms
    spread is the exact second moment of the discretized profile, which is
    smaller than the requested decay constant once truncated to n_taps.
    """
    if n_taps < 2:
        raise ConfigError("a selective channel needs at least 2 taps")
    if not rms_spread_chips > 0:
        raise ConfigError("rms delay spread must be positive")
    delays = np.arange(n_taps)
    powers = np.exp(-delays / rms_spread_chips)
    powers /= powers.sum()
    mean_d = float(powers @ delays)
    rms = float(np.sqrt(powers @ delays**2 - mean_d**2))
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(2 * n_taps).view(complex)
    gains = np.sqrt(powers / 2) * z
    return ChannelRealization(tuple(gains), tuple(int(d) for d in delays), tuple(powers), rms)


def apply(wave: SampledWaveform, ch: ChannelRealization, M: int | None = None) -> SampledWaveform:
    """Convolve a waveform with a tap delay line.

    Output is longer than the input by the largest delay, carrying the
    inter-symbol spill-over of a burst.  Delays are quantized to the
    sample grid; pass M when the waveform is oversampled so chips convert
    to samples (at one sample per chip M is irrelevant).
    """
    rate = wave.rate
    os = 1 if M is None else rate // M
    if M is not None and rate % M:
        raise ConfigError(f"sample rate {rate} is not a multiple of M={M}")
    d_samp = [int(round(d * os)) for d in ch.delays_chips]
    if max(d_samp) >= rate:
        raise ConfigError("tap delay reaches a full symbol")
    out = np.zeros(len(wave) + max(d_samp), complex)
    for g, d in zip(ch.gains, d_samp):
        out[d : d + len(wave)] += g * wave.samples
    return SampledWaveform(out, rate)
