"""Monte Carlo error-rate campaigns and efficiency bookkeeping.

A campaign runs one configuration over an Eb/N0 grid, generating random
payload bursts, pushing them through a channel preset, demodulating, and
counting symbol and bit errors until a stopping rule fires.  Efficiency
sweeps reduce each campaign to a single (DoF-per-bit, dB-per-bit) point
for comparison against the Shannon-Hartley trade-off.

Channel presets and their receivers:

* ``awgn``: front-end band projection (when oversampled) then the
  noncoherent dechirp/DFT bank.
* ``flat``: one Rayleigh gain per burst ahead of the noise; same receiver
  (a common scale does not move a magnitude argmax).
* ``selective(n_taps,rms)``: chip-spaced exponential fading per burst.
  The receiver correlates each symbol window, extended by the channel
  memory, against channel-convolved candidate symbols with the
  realization known at the receiver.  This is the matched-filter bank for
  the actual received pulses; the plain dechirp bank is mismatched here
  because every tap shifts the dechirped tone by its own delay.

All randomness derives from one master seed through spawned child
sequences (one per grid point, consumed in a fixed burst order), so a
campaign is reproducible down to the noise samples.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import re
from dataclasses import dataclass, asdict
from functools import lru_cache

import numpy as np

from .errors import ConfigError, InfeasibleError
from .channel import NoiseSpec, apply, awgn, draw_flat, draw_selective
from .modem import detect_stream, lowpass
from .waveform import GmConfig, SampledWaveform
from .waveform import _unit_symbol

__all__ = [
    "ExperimentConfig",
    "EfficiencyPoint",
    "shannon_bound",
    "resource_efficiency",
    "wilson_interval",
    "run_ser_campaign",
    "efficiency_sweep",
    "config_hash",
    "write_curve_csv",
    "write_summary_json",
]

_PRESET_RE = re.compile(r"^(awgn|flat)$|^selective\(\s*(\d+)\s*,\s*([0-9.eE+-]+)\s*\)$")


def _parse_preset(preset: str):
    m = _PRESET_RE.match(preset.strip())
    if not m:
        raise ConfigError(f"unknown channel preset {preset!r}")
    if m.group(1):
        return m.group(1), None, None
    return "selective", int(m.group(2)), float(m.group(3))


@dataclass(frozen=True)
class ExperimentConfig:
    cfg: GmConfig
    channel: str = "awgn"
    eb_n0_db: tuple = (0.0, 2.0, 4.0, 6.0, 8.0)
    min_errors: int = 200
    max_symbols: int = 10_000_000
    burst_symbols: int = 64
    seed: int = 0
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "eb_n0_db", tuple(float(x) for x in self.eb_n0_db))
        if not self.eb_n0_db:
            raise ConfigError("Eb/N0 grid is empty")
        if self.min_errors < 1 or self.max_symbols < 1 or self.burst_symbols < 1:
            raise ConfigError("stopping rule and burst size must be positive")
        if self.min_errors > self.max_symbols:
            raise InfeasibleError("min_errors can never be reached within max_symbols")
        kind, n_taps, _ = _parse_preset(self.channel)
        if kind == "selective" and self.cfg.oversample != 1:
            raise ConfigError("the selective preset runs at one sample per chip")
        if kind == "selective" and n_taps >= self.cfg.M:
            raise ConfigError("channel memory must be shorter than a symbol")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        try:
            cfg = GmConfig(
                M=int(d.pop("M")),
                alpha_set=tuple(d.pop("alpha_set", (0,))),
                oversample=int(d.pop("oversample", 1)),
            )
            return cls(cfg=cfg, **d)
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"bad experiment config: {e}") from e


@dataclass(frozen=True)
class EfficiencyPoint:
    eta: float
    epsilon_db: float
    target_ser: float
    channel: str
    label: str = ""


def shannon_bound(eta: float):
    """Minimum energy per bit at eta DoF per bit: eta * (2^(1/eta) - 1).

    Returns (linear, dB).  Decreases toward ln 2 (-1.59 dB) as eta grows.
    """
    if not eta > 0:
        raise ConfigError("eta must be positive")
    eps = eta * (2.0 ** (1.0 / eta) - 1.0)
    return eps, 10 * math.log10(eps)


def resource_efficiency(cfg: GmConfig, w_pass_dof: float | None = None):
    """Bits per degree of freedom and its inverse.

    w_pass_dof is the passband DoF count per symbol interval; it defaults
    to the nominal band width M.  Returns (u, eta) with u = ell_sym /
    w_pass_dof and eta = 1/u.
    """
    w = float(cfg.M if w_pass_dof is None else w_pass_dof)
    if w < cfg.M:
        raise ConfigError("passband cannot be narrower than the nominal band")
    u = cfg.ell_sym / w
    return u, 1.0 / u


def wilson_interval(k: int, n: int, z: float = 1.96):
    """Wilson 95% (by default) score interval for k successes in n trials."""
    if n < 1 or not 0 <= k <= n:
        raise ConfigError("need 0 <= k <= n with n >= 1")
    p = k / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


@lru_cache(maxsize=1)
def _popcount_table() -> np.ndarray:
    return np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)


def _bit_errors(tx_words: np.ndarray, rx_words: np.ndarray) -> int:
    return int(_popcount_table()[np.bitwise_xor(tx_words, rx_words)].sum())


def _burst_matrix(a_idx, betas, cfg: GmConfig) -> np.ndarray:
    out = np.empty((len(betas), cfg.rate), complex)
    for i, (a, b) in enumerate(zip(a_idx, betas)):
        out[i] = _unit_symbol(float(cfg.alpha_set[a]), float(b), cfg.M, cfg.rate)
    return out


def _candidate_bank(cfg: GmConfig, ch) -> np.ndarray:
    """Channel-convolved copies of every (alpha, beta) symbol, rows in
    branch-major order, each extended by the channel memory."""
    M = cfg.M
    base = np.empty((cfg.n_branches * M, M), complex)
    for k, a in enumerate(cfg.alpha_set):
        for b in range(M):
            base[k * M + b] = _unit_symbol(float(a), float(b), M, M)
    memory = max(int(d) for d in ch.delays_chips)
    bank = np.zeros((len(base), M + memory), complex)
    for g, d in zip(ch.gains, ch.delays_chips):
        bank[:, int(d) : int(d) + M] += g * base
    return bank


def _run_point(exp: ExperimentConfig, eb_db: float, rng: np.random.Generator):
    cfg = exp.cfg
    kind, n_taps, rms = _parse_preset(exp.channel)
    spec = NoiseSpec(eb_db, cfg.ell_sym)
    n_sym = n_err = n_bit_err = 0
    while n_err < exp.min_errors and n_sym < exp.max_symbols:
        nb = min(exp.burst_symbols, exp.max_symbols - n_sym)
        a_idx = rng.integers(0, cfg.n_branches, nb)
        betas = rng.integers(0, cfg.M, nb)
        x = SampledWaveform(_burst_matrix(a_idx, betas, cfg).ravel(), cfg.rate)

        if kind == "selective":
            ch = draw_selective(n_taps, rms, rng)
            y = awgn(apply(x, ch, cfg.M), spec, rng)
            memory = max(int(d) for d in ch.delays_chips)
            bank = _candidate_bank(cfg, ch)
            idx = np.arange(nb)[:, None] * cfg.M + np.arange(cfg.M + memory)
            scores = np.abs(y.samples[idx] @ bank.conj().T)
            flat = np.argmax(scores, axis=1)
            ahat, bhat = flat // cfg.M, flat % cfg.M
        else:
            if kind == "flat":
                x = apply(x, draw_flat(rng), cfg.M)
            y = lowpass(awgn(x, spec, rng), cfg.M)
            ahat, bhat = detect_stream(y.samples.reshape(nb, cfg.M), cfg)

        n_sym += nb
        n_err += int(np.count_nonzero((ahat != a_idx) | (bhat != betas)))
        n_bit_err += _bit_errors((a_idx << cfg.m) | betas, (ahat << cfg.m) | bhat)
    lo, hi = wilson_interval(n_err, n_sym)
    return {
        "eb_n0_db": eb_db,
        "n_symbols": n_sym,
        "n_errors": n_err,
        "ser": n_err / n_sym,
        "ci_lo": lo,
        "ci_hi": hi,
        "n_bits": n_sym * cfg.ell_sym,
        "n_bit_errors": n_bit_err,
        "ber": n_bit_err / (n_sym * cfg.ell_sym),
    }


def run_ser_campaign(exp: ExperimentConfig) -> list:
    """Error rates over the Eb/N0 grid; one result dict per point.

    Each point stops at min_errors symbol errors or max_symbols symbols,
    whichever comes first, and carries a Wilson 95% interval on the SER.
    """
    seeds = np.random.SeedSequence(exp.seed).spawn(len(exp.eb_n0_db))
    return [
        _run_point(exp, eb, np.random.default_rng(s))
        for eb, s in zip(exp.eb_n0_db, seeds)
    ]


def _crossing_db(rows: list, target: float) -> float:
    """Eb/N0 where the SER curve crosses the target, by log-linear
    interpolation; zero counts get half-an-error continuity floors."""
    ebs = np.array([r["eb_n0_db"] for r in rows])
    sers = np.array([max(r["ser"], 0.5 / r["n_symbols"]) for r in rows])
    below = np.flatnonzero(sers <= target)
    if below.size == 0:
        raise InfeasibleError(f"target SER {target} not reached on the grid")
    i = below[0]
    if i == 0:
        return float(ebs[0])
    f = (math.log10(target) - math.log10(sers[i - 1])) / (
        math.log10(sers[i]) - math.log10(sers[i - 1])
    )
    return float(ebs[i - 1] + f * (ebs[i] - ebs[i - 1]))


def efficiency_sweep(experiments, target_ser: float = 1e-2, w_pass_dof=None) -> list:
    """Reduce campaigns to (eta, epsilon) points at a target error rate.

    epsilon is the interpolated Eb/N0 (dB) where each campaign's SER curve
    crosses the target; eta comes from resource_efficiency with the
    nominal band as the default passband.
    """
    if not 0 < target_ser < 1:
        raise ConfigError("target SER must be in (0, 1)")
    points = []
    for exp in experiments:
        rows = run_ser_campaign(exp)
        _, eta = resource_efficiency(exp.cfg, w_pass_dof)
        eps = _crossing_db(rows, target_ser)
        points.append(EfficiencyPoint(eta, eps, target_ser, exp.channel, exp.label))
    return points


def config_hash(exp: ExperimentConfig) -> str:
    blob = json.dumps(asdict(exp), sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def write_curve_csv(path, rows: list, meta: dict | None = None) -> None:
    """Write result rows as CSV with '# key=value' header comments."""
    if not rows:
        raise ConfigError("nothing to write")
    with open(path, "w", newline="") as fh:
        for k, v in (meta or {}).items():
            fh.write(f"# {k}={v}\n")
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def write_summary_json(path, obj: dict, meta: dict | None = None) -> None:
    payload = dict(meta or {})
    payload.update(obj)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
