"""Symbol alphabets and baseband waveform synthesis for the generalized
chirp-modulation (GM) family.

A GM symbol over one unit-duration interval is a linear chirp described by
three parameters: a frequency spread factor ``alpha`` (how fast the
instantaneous frequency ramps, in symbol-rate-squared units), a frequency
shift ``beta`` (the starting tone index, in symbol-rate units), and a
complex gain ``rho``.  Setting ``alpha = 0`` gives plain M-ary FSK, and
``alpha = M`` gives the chirp modulation used by LoRa radios.

All time axes are normalized to the symbol duration and all frequencies to
the symbol rate, so a modulation order ``M`` occupies the nominal band
``[-M/2, M/2)``.  To stay inside that band the instantaneous frequency is
wrapped modulo ``M``, which inserts phase-ramp corrections at the wrap
instants; the machine-type-communication subset (constant envelope, unit
``rho``, even integer ``alpha``) is phase-continuous across symbol
boundaries by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ConfigError

__all__ = [
    "GmSymbolParams",
    "GmConfig",
    "SampledWaveform",
    "alphabet_alpha",
    "default_alpha_subset",
    "payload_bits",
    "inst_frequency",
    "wrap_breakpoints",
    "symbol_phase",
    "synthesize",
    "canonical_chirp",
    "special_case",
]

QPSK = (1 + 0j, 1j, -1 + 0j, -1j)


@dataclass(frozen=True)
class GmSymbolParams:
    """One symbol's coordinates: spread factor, frequency shift, gain."""

    alpha: float
    beta: float
    rho: complex = 1 + 0j


@dataclass(frozen=True)
class GmConfig:
    """Static modulation parameters shared by a whole experiment.

    ``alpha_set`` is kept sorted ascending; its position index is the value
    carried by the alpha-dimension bits.  ``oversample`` is the number of
    samples per chip (one chip = 1/M of a symbol), so waveforms carry
    ``M * oversample`` samples per symbol.
    """

    M: int
    alpha_set: tuple = (0,)
    oversample: int = 1

    def __post_init__(self):
        if self.M < 2 or self.M & (self.M - 1):
            raise ConfigError(f"modulation order must be a power of two, got {self.M}")
        if self.oversample < 1:
            raise ConfigError("oversample factor must be >= 1")
        aset = tuple(sorted(self.alpha_set))
        if len(aset) == 0 or len(set(aset)) != len(aset):
            raise ConfigError("alpha_set must be nonempty and distinct")
        if len(aset) & (len(aset) - 1):
            raise ConfigError(f"alpha_set size must be a power of two, got {len(aset)}")
        allowed = set(alphabet_alpha(self.M))
        bad = [a for a in aset if a not in allowed]
        if bad:
            raise ConfigError(f"alpha values {bad} are not valid for M={self.M}")
        object.__setattr__(self, "alpha_set", aset)

    @property
    def m(self) -> int:
        return self.M.bit_length() - 1

    @property
    def n(self) -> int:
        return len(self.alpha_set).bit_length() - 1

    @property
    def ell_sym(self) -> int:
        """Bits carried per symbol over both keying dimensions."""
        return self.m + self.n

    @property
    def n_branches(self) -> int:
        return len(self.alpha_set)

    @property
    def rate(self) -> int:
        """Samples per symbol duration."""
        return self.M * self.oversample


@dataclass
class SampledWaveform:
    """Complex baseband samples plus their rate in samples per symbol."""

    samples: np.ndarray
    rate: int

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        """Length in symbol periods."""
        return len(self.samples) / self.rate

    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2))


def alphabet_alpha(M: int) -> list:
    """Full spread-factor alphabet for order ``M``: zero plus ``+-M/2^i``.

    Only even values keep the phase trajectory continuous from one symbol
    to the next, so odd candidates (possible when M < 4) are dropped.  The
    result is sorted ascending and has ``2*log2(M) + 1`` members for
    M >= 4.
    """
    if M < 2 or M & (M - 1):
        raise ConfigError(f"modulation order must be a power of two, got {M}")
    m = M.bit_length() - 1
    values = {0}
    for i in range(m):
        a = M >> i
        if a % 2 == 0:
            values.update((a, -a))
    return sorted(values)


def default_alpha_subset(M: int, n_bar: int) -> tuple:
    """Pick ``n_bar`` spread factors with smallest magnitude.

    Ties between +a and -a go to the negative member first.  Small |alpha|
    keeps out-of-band leakage low, which makes this the default choice for
    spectral work; detection-oriented experiments may prefer a set with
    larger pairwise spacing and can pass any explicit subset instead.
    """
    full = alphabet_alpha(M)
    if n_bar < 1 or n_bar & (n_bar - 1):
        raise ConfigError(f"subset size must be a power of two, got {n_bar}")
    if n_bar > len(full):
        raise ConfigError(f"subset size {n_bar} exceeds alphabet size {len(full)}")
    ranked = sorted(full, key=lambda a: (abs(a), a))
    return tuple(sorted(ranked[:n_bar]))


def payload_bits(M: int, alpha_set) -> tuple:
    """Return (m, n, bits_per_symbol) for the given order and spread set.

    m counts shift bits (log2 M); n is the largest whole number of bits
    the spread set can carry, so a full alphabet of 2m+1 members yields
    n = floor(log2(2m+1)) even though keying then uses only 2^n of them.
    """
    full = set(alphabet_alpha(M))
    aset = tuple(alpha_set)
    if not aset or len(set(aset)) != len(aset) or not set(aset) <= full:
        raise ConfigError("alpha_set must be distinct members of the full alphabet")
    m = M.bit_length() - 1
    n = len(aset).bit_length() - 1
    return m, n, m + n


def inst_frequency(params: GmSymbolParams, M: int, t):
    """Instantaneous frequency offset at normalized time ``t``.

    The linear ramp ``alpha*t + beta`` is folded into ``[-M/2, M/2)`` so
    the symbol never leaves its nominal band.
    """
    t = np.asarray(t)
    out = np.mod(params.alpha * t + params.beta, M) - M / 2
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=4096)
def _breakpoints(alpha: float, beta: float, M: int) -> tuple:
    if alpha == 0:
        return ()
    ts = []
    if alpha > 0:
        q_hi = int(math.ceil((alpha + beta) / M)) + 1
        candidates = ((q * M - beta) / alpha for q in range(1, q_hi + 1))
    else:
        q_hi = int(math.ceil((abs(alpha) + M) / M)) + 1
        candidates = (((1 - q) * M - beta) / alpha for q in range(1, q_hi + 1))
    for t in candidates:
        if 0 <= t < 1:
            ts.append(t)
    return tuple(sorted(ts))


def wrap_breakpoints(params: GmSymbolParams, M: int) -> tuple:
    """Times in [0, 1) where the frequency ramp folds back, plus their count.

    Enumerated directly from the fold condition rather than any closed-form
    count, which avoids ambiguity when a fold lands exactly on a symbol
    boundary (the boundary instant belongs to the next symbol and is not
    counted).
    """
    ts = _breakpoints(params.alpha, params.beta, M)
    return ts, len(ts)


def symbol_phase(params: GmSymbolParams, M: int, t):
    """Phase in radians at normalized time ``t`` (0 <= t <= 1).

    Equals ``pi*(alpha*t^2 + (2*beta - M)*t)`` plus a piecewise-linear
    correction that kicks in after each band fold; ``t = 1`` is evaluated
    as the limit from the left so the correction terms stay active.
    """
    t = np.asarray(t, dtype=float)
    gamma = np.zeros_like(t)
    sgn = np.sign(params.alpha)
    for tq in _breakpoints(params.alpha, params.beta, M):
        gamma = gamma - 2 * M * sgn * (t - tq) * (t >= tq)
    out = np.pi * (params.alpha * t * t + (2 * params.beta - M) * t + gamma)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=8192)
def _unit_symbol(alpha: float, beta: float, M: int, rate: int) -> np.ndarray:
    t = np.arange(rate) / rate
    s = np.exp(1j * symbol_phase(GmSymbolParams(alpha, beta), M, t))
    s.flags.writeable = False
    return s


def synthesize(params: GmSymbolParams, cfg: GmConfig) -> SampledWaveform:
    """Sample one symbol at ``cfg.rate`` points over its unit duration.

    Samples sit at ``t = i / rate``; with ``oversample = 1`` this is the
    chip-rate sequence the demodulator works on.  Every sample of a
    unit-gain symbol has magnitude one.
    """
    if not 0 <= params.beta < cfg.M:
        raise ConfigError(f"beta must lie in [0, {cfg.M}), got {params.beta}")
    s = _unit_symbol(params.alpha, params.beta, cfg.M, cfg.rate)
    if params.rho != 1:
        s = params.rho * s
    return SampledWaveform(s, cfg.rate)


def canonical_chirp(alpha: float, offset: float, rate: int, n_symbols: int = 1) -> SampledWaveform:
    """Unwrapped linear chirp ``exp(j*pi*(alpha*t^2 + 2*offset*t))``.

    No band folding is applied, so the ramp may run outside [-M/2, M/2);
    this is the raw form used for synchronization preambles and for
    correlation studies that need the unfolded trajectory.  The phase law
    restarts at every symbol boundary when ``n_symbols > 1``.
    """
    t = np.arange(rate) / rate
    sym = np.exp(1j * np.pi * (alpha * t * t + 2 * offset * t))
    return SampledWaveform(np.tile(sym, n_symbols), rate)


def special_case(name: str, M: int, constellation=None) -> Callable[..., GmSymbolParams]:
    """Factory for the classic schemes the GM family contains.

    ``fsk`` and ``lora`` return ``factory(beta)``.  ``qam`` returns
    ``factory(point_index)`` with both alpha and beta pinned to zero, and
    ``fqam`` / ``psk-lora`` return ``factory(beta, point_index)``.  The
    default constellation is QPSK; ``psk-lora`` requires unit-magnitude
    points.
    """
    key = name.strip().lower().replace("_", "-")
    points = QPSK if constellation is None else tuple(complex(c) for c in constellation)

    if key == "fsk":
        return lambda beta: GmSymbolParams(0, beta)
    if key == "lora":
        return lambda beta: GmSymbolParams(M, beta)
    if key == "qam":
        return lambda idx: GmSymbolParams(0, 0, points[idx])
    if key == "fqam":
        return lambda beta, idx: GmSymbolParams(0, beta, points[idx])
    if key == "psk-lora":
        if any(abs(abs(c) - 1) > 1e-12 for c in points):
            raise ConfigError("psk-lora requires a unit-magnitude constellation")
        return lambda beta, idx: GmSymbolParams(M, beta, points[idx])
    raise ConfigError(f"unknown scheme {name!r}")
