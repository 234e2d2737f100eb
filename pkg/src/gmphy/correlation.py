"""Cross- and auto-correlation analysis of GM symbols.

Closed forms exist only for the unfolded chirp: spacing two symbols in the
shift dimension gives a sinc law, and spacing them in the spread dimension
gives a Fresnel-integral law.  Folded (band-constrained) waveforms are
handled by direct sampled correlation, with analytic upper bounds checked
against them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ConfigError
from .waveform import GmSymbolParams, SampledWaveform
from .waveform import _unit_symbol

__all__ = [
    "CorrelationResult",
    "xcorr_beta",
    "xcorr_alpha",
    "xcorr_sampled",
    "beta_orthogonality_bound",
    "alpha_xcorr_bound",
    "autocorr_delay",
    "leakage_variance",
]


@dataclass(frozen=True)
class CorrelationResult:
    value: complex
    magnitude: float
    normalization: float


def xcorr_beta(dbeta: float) -> float:
    """|sin(pi*db)/(pi*db)| between two same-spread symbols shifted by ``dbeta``.

    Integer spacings are exact nulls, which is what makes the shift
    dimension an orthogonal keying axis.
    """
    return float(np.abs(np.sinc(dbeta)))


def xcorr_alpha(dalpha: float) -> float:
    """Correlation magnitude between two symbols whose spread factors differ.

    Evaluates ``|integral_0^1 exp(j*pi*dalpha*t^2) dt|`` by adaptive
    quadrature (absolute tolerance 1e-10).  This equals the complex Fresnel
    integral F(x)/x at ``x = sqrt(2*|dalpha|)``, decaying like
    ``1/sqrt(|dalpha|)`` with shallow ripples, so widely spaced spread
    factors are nearly orthogonal.
    """
    da = abs(float(dalpha))
    if da == 0:
        return 1.0
    re = quad(lambda t: np.cos(np.pi * da * t * t), 0, 1, epsabs=1e-12, limit=400)[0]
    im = quad(lambda t: np.sin(np.pi * da * t * t), 0, 1, epsabs=1e-12, limit=400)[0]
    return float(abs(re + 1j * im))


def xcorr_sampled(
    w1: SampledWaveform,
    w2: SampledWaveform,
    lag: int = 0,
    freq_offset: float = 0.0,
) -> CorrelationResult:
    """Discrete correlation of ``w1`` (optionally frequency shifted) against
    ``w2`` delayed by ``lag`` samples.

    Normalization uses the full energies of both inputs rather than the
    overlap energy, so a partial overlap shows up as reduced magnitude.
    The result never exceeds one.
    """
    if w1.rate != w2.rate:
        raise ConfigError("waveform rates differ")
    x = w1.samples
    y = w2.samples
    if abs(lag) >= min(len(x), len(y)):
        raise ConfigError("lag magnitude must be smaller than the waveforms")
    if freq_offset:
        t = np.arange(len(x)) / w1.rate
        x = x * np.exp(2j * np.pi * freq_offset * t)
    if lag >= 0:
        a, b = x[lag:], y[: len(y) - lag]
    else:
        a, b = x[: len(x) + lag], y[-lag:]
    n = min(len(a), len(b))
    norm = np.sqrt(np.sum(np.abs(x) ** 2) * np.sum(np.abs(y) ** 2))
    value = complex(np.vdot(b[:n], a[:n]) / norm)
    return CorrelationResult(value, abs(value), float(norm))


def beta_orthogonality_bound(M: int, alpha: float) -> float:
    """Residual term bounding how far a folded chirp's shift-dimension
    cross-correlation can exceed the sinc law.

    Shrinks as |alpha| grows; inapplicable at alpha = 0 where the sinc law
    is already exact.
    """
    if alpha == 0:
        raise ConfigError("bound applies only to nonzero spread factors")
    r = M / abs(alpha)
    return float(r / (np.sqrt(2 * M) * np.sqrt(r) - 1))


def alpha_xcorr_bound(dalpha: float) -> float:
    """Envelope ``3*sqrt(2)/sqrt(|da|)`` over the spread-dimension correlation."""
    if dalpha == 0:
        raise ConfigError("spacing must be nonzero")
    return float(3 * np.sqrt(2) / np.sqrt(abs(dalpha)))


def autocorr_delay(params: GmSymbolParams, M: int, tau_chips: float, oversample: int = 16) -> float:
    """Correlation magnitude between a symbol stream and itself delayed by
    ``tau_chips`` chips, evaluated over one symbol window.

    The delayed samples that fall before the window come from the previous
    repetition of the same symbol, which phase continuity makes identical
    to the tail of the current one, so the computation is circular.  A zero
    spread factor gives magnitude one at every delay; any nonzero spread
    factor decorrelates with delay, which is the frequency-diversity handle
    against multipath.
    """
    if not 0 <= tau_chips < M:
        raise ConfigError(f"delay must lie in [0, {M}) chips")
    s = _unit_symbol(float(params.alpha), float(params.beta), M, M * oversample)
    shift = int(round(tau_chips * oversample))
    value = np.vdot(np.roll(s, shift), s) / len(s)
    return float(abs(value))


def leakage_variance(params: GmSymbolParams, M: int, channel) -> float:
    """Variance of the energy fluctuation a multipath profile induces at the
    output of a filter matched to the through-channel symbol.

    Sums ``|autocorr(delay_ij)|^2 * p_i * p_j`` over distinct tap pairs of
    the profile.  Zero for a single tap; maximal when the symbol stays
    fully correlated across the tap spacings, as a pure tone does.
    """
    powers = np.asarray(channel.tap_powers, dtype=float)
    if abs(powers.sum() - 1.0) > 1e-9:
        raise ConfigError("channel tap powers must sum to one")
    delays = np.asarray(channel.delays_chips, dtype=float)
    total = 0.0
    for i in range(len(powers)):
        for j in range(len(powers)):
            if i == j:
                continue
            lam = autocorr_delay(params, M, abs(delays[j] - delays[i]) % M)
            total += lam * lam * powers[i] * powers[j]
    return float(total)
