"""Bit mapping, symbol-stream synthesis, and DFT-bank demodulation.

Transmit side: bits are grouped into ``ell_sym``-bit words, the leading n
bits select the spread factor from the configured set and the trailing m
bits give the frequency shift.  Receive side: each symbol window is
multiplied by the conjugate beta=0 reference chirp of a branch (dechirp),
which collapses a matched symbol to a pure tone, and an M-point DFT scores
all M shifts at once.  Repeating over the branch set gives an M x n_branch
score matrix; the argmax decides the symbol.

Detection assumes symbol timing and carrier alignment; acquisition is the
preamble module's job.  All transforms use the unnormalized forward DFT,
so a noiseless matched symbol at one sample per chip scores exactly M.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .waveform import GmConfig, GmSymbolParams, SampledWaveform
from .waveform import _unit_symbol

__all__ = [
    "map_bits",
    "transmit",
    "lowpass",
    "dechirp",
    "detect",
    "detect_stream",
    "demap",
]


def _as_bit_array(bits) -> np.ndarray:
    if isinstance(bits, str):
        bits = [c for c in bits if not c.isspace()]
    try:
        arr = np.asarray([int(b) for b in bits], dtype=np.uint8)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bits must be 0 or 1: {exc}") from exc
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ConfigError("bits must be 0 or 1")
    return arr


def map_bits(bits, cfg: GmConfig) -> list:
    """Group bits into symbols: n spread-factor bits then m shift bits.

    Accepts a 0/1 string (whitespace ignored) or any iterable of bits.
    The final group is zero-padded to a full symbol.
    """
    arr = _as_bit_array(bits)
    if arr.size == 0:
        raise ConfigError("no bits to map")
    m, n, ell = cfg.m, cfg.n, cfg.ell_sym
    pad = (-arr.size) % ell
    if pad:
        arr = np.concatenate([arr, np.zeros(pad, np.uint8)])
    groups = arr.reshape(-1, ell)
    weights_n = 1 << np.arange(n - 1, -1, -1) if n else np.zeros(0, int)
    weights_m = 1 << np.arange(m - 1, -1, -1)
    a_idx = groups[:, :n] @ weights_n if n else np.zeros(len(groups), int)
    betas = groups[:, n:] @ weights_m
    return [GmSymbolParams(cfg.alpha_set[int(a)], int(b)) for a, b in zip(a_idx, betas)]


def transmit(symbols, cfg: GmConfig) -> SampledWaveform:
    """Concatenate per-symbol waveforms into one burst.

    Valid configurations are phase-continuous across junctions because
    every symbol starts and ends at the same phase modulo 2*pi.
    """
    if not symbols:
        raise ConfigError("no symbols to transmit")
    rate = cfg.rate
    out = np.empty((len(symbols), rate), complex)
    for i, p in enumerate(symbols):
        row = _unit_symbol(float(p.alpha), float(p.beta), cfg.M, rate)
        out[i] = row if p.rho == 1 else p.rho * row
    return SampledWaveform(out.ravel(), rate)


def lowpass(wave: SampledWaveform, M: int) -> SampledWaveform:
    """Receiver front end: keep the nominal band, resample to 1/chip.

    Each symbol window is transformed alone and projected onto the M
    in-band frequency bins [-M/2, M/2), a circular brick-wall filter that
    leaves integer-frequency tones untouched.  At one sample per chip the
    input is returned unchanged, out-of-band power and all.
    """
    os, rem = divmod(wave.rate, M)
    if rem:
        raise ConfigError(f"sample rate {wave.rate} is not a multiple of M={M}")
    if os == 1:
        return wave
    n_sym, tail = divmod(len(wave), wave.rate)
    if tail or n_sym == 0:
        raise ConfigError("waveform must hold a whole number of symbols")
    y = wave.samples.reshape(n_sym, wave.rate)
    Y = np.fft.fft(y, axis=1)
    f = np.fft.fftfreq(wave.rate, d=1.0 / wave.rate).astype(int)
    keep = np.flatnonzero((f >= -M // 2) & (f < M // 2))
    Yd = np.zeros((n_sym, M), complex)
    Yd[:, f[keep] % M] = Y[:, keep]
    return SampledWaveform(np.fft.ifft(Yd, axis=1).ravel() / os, M)


def _reference(alpha: float, M: int) -> np.ndarray:
    return _unit_symbol(float(alpha), 0.0, M, M)


def dechirp(samples, alpha_branch: float, cfg: GmConfig) -> np.ndarray:
    """Multiply one symbol's chips by the conjugate beta=0 reference.

    A symbol whose spread factor matches the branch comes out as the tone
    exp(j*2*pi*beta*i/M); otherwise a residual chirp remains.
    """
    x = np.asarray(samples)
    if x.shape != (cfg.M,):
        raise ConfigError(f"expected {cfg.M} samples, got {x.shape}")
    return x * np.conj(_reference(alpha_branch, cfg.M))


def detect(samples, cfg: GmConfig):
    """Score one symbol against every (shift, branch) pair and decide.

    Returns (scores, alpha_index, beta) where scores is the M x n_branch
    matrix of DFT magnitudes.  The argmax tie rule is lowest beta first,
    then lowest branch index.
    """
    x = np.asarray(samples)
    if x.shape != (cfg.M,):
        raise ConfigError(f"expected {cfg.M} samples, got {x.shape}")
    mat = np.empty((cfg.M, cfg.n_branches))
    for k, a in enumerate(cfg.alpha_set):
        mat[:, k] = np.abs(np.fft.fft(x * np.conj(_reference(a, cfg.M))))
    flat = int(np.argmax(mat.ravel()))
    return mat, flat % cfg.n_branches, flat // cfg.n_branches


def detect_stream(chips: np.ndarray, cfg: GmConfig):
    """Vectorized detect over a (n_symbols, M) array of chip windows.

    Returns (alpha_index, beta) integer arrays.  Decisions match detect()
    symbol for symbol, including the tie rule.
    """
    chips = np.asarray(chips)
    if chips.ndim != 2 or chips.shape[1] != cfg.M:
        raise ConfigError(f"expected (n, {cfg.M}) chip array, got {chips.shape}")
    refs = np.stack([_reference(a, cfg.M) for a in cfg.alpha_set])
    scores = np.abs(np.fft.fft(chips[None, :, :] * np.conj(refs)[:, None, :], axis=2))
    flat = np.argmax(scores.transpose(1, 2, 0).reshape(len(chips), -1), axis=1)
    return (flat % cfg.n_branches).astype(int), (flat // cfg.n_branches).astype(int)


def demap(decisions, cfg: GmConfig) -> np.ndarray:
    """Inverse of map_bits: (alpha_index, beta) decisions back to bits."""
    m, n = cfg.m, cfg.n
    out = []
    for a_idx, beta in decisions:
        a_idx, beta = int(a_idx), int(beta)
        if not 0 <= a_idx < cfg.n_branches:
            raise ConfigError(f"branch index {a_idx} out of range")
        if not 0 <= beta < cfg.M:
            raise ConfigError(f"shift {beta} out of range")
        word = (a_idx << m) | beta
        out.extend((word >> k) & 1 for k in range(cfg.ell_sym - 1, -1, -1))
    return np.asarray(out, dtype=np.uint8)
