"""Synchronization preamble detection under carrier frequency error.

A chirp preamble turns a carrier offset into a time shift: the matched
filter still fires near full strength, just at a displaced lag of about
-offset/alpha symbols.  A tone preamble has no such escape hatch and its
peak collapses along sinc(offset).  The detector here is a plain sliding
normalized correlation of one reference symbol against the received
burst; no frequency hypotheses are needed for the chirp, which is the
point of using one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .waveform import SampledWaveform, canonical_chirp

__all__ = [
    "PreambleSpec",
    "build_preamble",
    "detect_preamble",
    "tolerance_curve",
    "fractional_lag",
]


@dataclass(frozen=True)
class PreambleSpec:
    """Repeated canonical chirp exp(j*pi*(alpha*t^2 + 2*offset*t)) on the
    unit symbol interval.  alpha=0 degenerates to a tone preamble, kept
    selectable so the two can be compared by the same machinery."""

    alpha: float
    offset: float = 0.0
    M: int = 128
    oversample: int = 4
    repeats: int = 8

    def __post_init__(self):
        if self.M < 1 or self.oversample < 1 or self.repeats < 1:
            raise ConfigError("M, oversample, and repeats must be positive")

    @property
    def rate(self) -> int:
        return self.M * self.oversample


def build_preamble(spec: PreambleSpec) -> SampledWaveform:
    return canonical_chirp(spec.alpha, spec.offset, spec.rate, spec.repeats)


def _reference(spec: PreambleSpec) -> np.ndarray:
    return canonical_chirp(spec.alpha, spec.offset, spec.rate, 1).samples


def detect_preamble(rx: SampledWaveform, spec: PreambleSpec, freq_grid=None, lag_grid=None):
    """Search a (frequency, lag) grid for the best one-symbol match.

    Correlates one reference symbol against rx windows starting at each
    lag (samples), optionally pre-rotating each window by a frequency
    hypothesis (symbol-rate units, window-relative time).  Magnitudes are
    normalized by reference and window energy, so no value can exceed 1.

    Returns (best_lag, best_magnitude, surface) with surface indexed
    [frequency, lag].  Ties go to the earliest grid entry.
    """
    if rx.rate != spec.rate:
        raise ConfigError("rx sample rate does not match the preamble spec")
    ref = _reference(spec)
    L = len(ref)
    if len(rx) < L:
        raise ConfigError("received burst is shorter than one symbol")
    if lag_grid is None:
        lag_grid = np.arange(len(rx) - L + 1)
    else:
        lag_grid = np.asarray(lag_grid, dtype=int)
    if freq_grid is None:
        freq_grid = np.zeros(1)
    else:
        freq_grid = np.asarray(freq_grid, dtype=float)
    if lag_grid.size == 0 or freq_grid.size == 0:
        raise ConfigError("empty search grid")
    if lag_grid.min() < 0 or lag_grid.max() > len(rx) - L:
        raise ConfigError("lag grid exceeds the received burst")

    t = np.arange(L) / spec.rate
    e_ref = float(np.sum(np.abs(ref) ** 2))
    power = np.concatenate(([0.0], np.cumsum(np.abs(rx.samples) ** 2)))
    e_win = power[lag_grid + L] - power[lag_grid]
    norm = np.sqrt(e_ref * e_win)
    norm[norm == 0] = np.inf

    windows = rx.samples[lag_grid[:, None] + np.arange(L)]
    surface = np.empty((len(freq_grid), len(lag_grid)))
    for i, f in enumerate(freq_grid):
        rot = windows * np.exp(2j * np.pi * f * t) if f else windows
        surface[i] = np.abs(rot @ np.conj(ref)) / norm
    fi, li = np.unravel_index(np.argmax(surface), surface.shape)
    return int(lag_grid[li]), float(surface[fi, li]), surface


def fractional_lag(lag: int, rate: int) -> float:
    """Map an absolute sample lag into a signed per-symbol lag in symbol
    units, folding out the preamble's repetition period."""
    return (((lag + rate // 2) % rate) - rate // 2) / rate


def tolerance_curve(spec: PreambleSpec, deltas) -> np.ndarray:
    """Peak matched-filter magnitude versus carrier offset.

    For each offset delta (symbol-rate units) the preamble is rotated by
    exp(j*2*pi*delta*t) over the whole burst and re-detected with a full
    lag search and no frequency hypothesis.  Returns rows of
    (delta, peak magnitude, best fractional lag in symbols).
    """
    deltas = np.atleast_1d(np.asarray(list(deltas), dtype=float))
    tx = build_preamble(spec)
    t = np.arange(len(tx)) / spec.rate
    rows = np.empty((len(deltas), 3))
    for i, d in enumerate(deltas):
        rx = SampledWaveform(tx.samples * np.exp(2j * np.pi * d * t), spec.rate)
        lag, peak, _ = detect_preamble(rx, spec)
        rows[i] = (d, peak, fractional_lag(lag, spec.rate))
    return rows
