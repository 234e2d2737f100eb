"""Chirp-family baseband toolkit: waveforms, spectra, detection, and
Monte Carlo experiment harness for frequency-shift and chirp-rate keying.
"""

__version__ = "0.1.0"

from .errors import ConfigError, InfeasibleError
from .waveform import (
    QPSK,
    GmConfig,
    GmSymbolParams,
    SampledWaveform,
    alphabet_alpha,
    canonical_chirp,
    default_alpha_subset,
    inst_frequency,
    payload_bits,
    special_case,
    symbol_phase,
    synthesize,
    wrap_breakpoints,
)
from .correlation import (
    CorrelationResult,
    alpha_xcorr_bound,
    autocorr_delay,
    beta_orthogonality_bound,
    leakage_variance,
    xcorr_alpha,
    xcorr_beta,
    xcorr_sampled,
)
from .spectrum import (
    EmissionMask,
    SpectrumEstimate,
    SymbolPolicy,
    estimate_psd,
    max_symbol_rate,
    oow,
    psd_with_rho,
    reference_mask,
)
from .modem import demap, dechirp, detect, detect_stream, lowpass, map_bits, transmit
from .channel import ChannelRealization, NoiseSpec, apply, awgn, draw_flat, draw_selective
from .preamble import PreambleSpec, build_preamble, detect_preamble, fractional_lag, tolerance_curve
from .harness import (
    EfficiencyPoint,
    ExperimentConfig,
    config_hash,
    efficiency_sweep,
    resource_efficiency,
    run_ser_campaign,
    shannon_bound,
    wilson_interval,
    write_curve_csv,
    write_summary_json,
)

__all__ = [
    "__version__",
    "ConfigError",
    "InfeasibleError",
    "QPSK",
    "GmConfig",
    "GmSymbolParams",
    "SampledWaveform",
    "alphabet_alpha",
    "canonical_chirp",
    "default_alpha_subset",
    "inst_frequency",
    "payload_bits",
    "special_case",
    "symbol_phase",
    "synthesize",
    "wrap_breakpoints",
    "CorrelationResult",
    "alpha_xcorr_bound",
    "autocorr_delay",
    "beta_orthogonality_bound",
    "leakage_variance",
    "xcorr_alpha",
    "xcorr_beta",
    "xcorr_sampled",
    "EmissionMask",
    "SpectrumEstimate",
    "SymbolPolicy",
    "estimate_psd",
    "max_symbol_rate",
    "oow",
    "psd_with_rho",
    "reference_mask",
    "demap",
    "dechirp",
    "detect",
    "detect_stream",
    "lowpass",
    "map_bits",
    "transmit",
    "ChannelRealization",
    "NoiseSpec",
    "apply",
    "awgn",
    "draw_flat",
    "draw_selective",
    "PreambleSpec",
    "build_preamble",
    "detect_preamble",
    "fractional_lag",
    "tolerance_curve",
    "EfficiencyPoint",
    "ExperimentConfig",
    "config_hash",
    "efficiency_sweep",
    "resource_efficiency",
    "run_ser_campaign",
    "shannon_bound",
    "wilson_interval",
    "write_curve_csv",
    "write_summary_json",
]
