import numpy as np
import pytest
from scipy import stats

from gmphy import (
    ChannelRealization,
    ConfigError,
    GmConfig,
    GmSymbolParams,
    NoiseSpec,
    SampledWaveform,
    apply,
    awgn,
    draw_flat,
    draw_selective,
    leakage_variance,
    transmit,
)


class TestNoiseSpec:
    def test_variance_formula(self):
        spec = NoiseSpec(10.0, 5)
        assert abs(spec.noise_variance(128) - 128 / (5 * 10.0)) < 1e-12
        assert abs(spec.noise_variance(512) - 4 * spec.noise_variance(128)) < 1e-12

    def test_mean_power_scales_variance(self):
        lo = NoiseSpec(6.0, 7, mean_power=0.5)
        hi = NoiseSpec(6.0, 7, mean_power=2.0)
        assert abs(hi.noise_variance(64) / lo.noise_variance(64) - 4.0) < 1e-12

    def test_validation(self):
        with pytest.raises(ConfigError):
            NoiseSpec(0.0, 0)
        with pytest.raises(ConfigError):
            NoiseSpec(0.0, 5, mean_power=0.0)
        with pytest.raises(ConfigError):
            NoiseSpec(float("nan"), 5)
        NoiseSpec(float("inf"), 5)  # noiseless sentinel is fine


class TestAwgn:
    def test_infinite_snr_is_identity(self):
        wave = SampledWaveform(np.exp(1j * np.arange(64)), 8)
        out = awgn(wave, NoiseSpec(float("inf"), 3), seed=0)
        np.testing.assert_array_equal(out.samples, wave.samples)
        assert out.samples is not wave.samples

    def test_calibration(self):
        # measured noise power matches the requested variance to 0.05 dB
        n = 1_000_000
        wave = SampledWaveform(np.zeros(n, dtype=complex), 8)
        spec = NoiseSpec(4.0, 3)
        out = awgn(wave, spec, seed=5)
        measured = np.mean(np.abs(out.samples) ** 2)
        expected = spec.noise_variance(8)
        assert abs(10 * np.log10(measured / expected)) < 0.05

    def test_seed_repeatability(self):
        wave = SampledWaveform(np.ones(256, dtype=complex), 16)
        a = awgn(wave, NoiseSpec(0.0, 4), seed=99)
        b = awgn(wave, NoiseSpec(0.0, 4), seed=99)
        c = awgn(wave, NoiseSpec(0.0, 4), seed=100)
        np.testing.assert_array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)


class TestFlatFade:
    def test_structure(self):
        ch = draw_flat(seed=1)
        assert ch.delays_chips == (0,)
        assert ch.tap_powers == (1.0,)
        assert ch.rms_spread_chips == 0.0
        assert len(ch.gains) == 1

    def test_unit_mean_power(self):
        rng = np.random.default_rng(2)
        g = np.array([draw_flat(rng).gains[0] for _ in range(100_000)])
        assert abs(np.mean(np.abs(g) ** 2) - 1.0) < 0.01
        assert abs(np.mean(g)) < 0.01

    def test_envelope_is_rayleigh(self):
        rng = np.random.default_rng(3)
        mag = np.abs([draw_flat(rng).gains[0] for _ in range(20_000)])
        res = stats.kstest(mag, "rayleigh", args=(0, 1 / np.sqrt(2)))
        assert res.pvalue > 0.01


class TestSelectiveFade:
    def test_profile_shape(self):
        ch = draw_selective(4, 1.5, seed=0)
        assert ch.delays_chips == (0, 1, 2, 3)
        assert abs(sum(ch.tap_powers) - 1.0) < 1e-12
        p = np.array(ch.tap_powers)
        assert np.all(p[:-1] > p[1:])  # exponential decay
        ratio = p[1] / p[0]
        assert abs(ratio - np.exp(-1 / 1.5)) < 1e-12

    def test_rms_metadata_matches_profile(self):
        ch = draw_selective(6, 2.0, seed=0)
        d = np.array(ch.delays_chips, dtype=float)
        p = np.array(ch.tap_powers)
        rms = np.sqrt(p @ d**2 - (p @ d) ** 2)
        assert abs(ch.rms_spread_chips - rms) < 1e-12
        # truncation keeps the realized spread below the decay constant
        assert ch.rms_spread_chips < 2.0

    def test_empirical_spread(self):
        rng = np.random.default_rng(4)
        acc_p = np.zeros(5)
        for _ in range(2000):
            ch = draw_selective(5, 1.2, rng)
            acc_p += np.abs(np.array(ch.gains)) ** 2
        acc_p /= acc_p.sum()
        d = np.arange(5.0)
        rms = np.sqrt(acc_p @ d**2 - (acc_p @ d) ** 2)
        assert abs(rms - draw_selective(5, 1.2, 0).rms_spread_chips) < 0.1 * rms

    def test_validation(self):
        with pytest.raises(ConfigError):
            draw_selective(1, 1.0)
        with pytest.raises(ConfigError):
            draw_selective(3, 0.0)
        with pytest.raises(ConfigError):
            ChannelRealization((1.0,), (0, 1), (1.0,))
        with pytest.raises(ConfigError):
            ChannelRealization((1.0, 0.5), (0, 1), (0.6, 0.5))


class TestApply:
    def test_single_unit_tap_is_identity(self):
        wave = SampledWaveform(np.arange(16, dtype=complex), 8)
        ch = ChannelRealization((1.0 + 0j,), (0,), (1.0,))
        out = apply(wave, ch)
        np.testing.assert_array_equal(out.samples, wave.samples)

    def test_linearity(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        wave = SampledWaveform(x, 16)
        cha = ChannelRealization((0.3 + 0.1j,), (0,), (1.0,), 0.0)
        chb = ChannelRealization((0.0,), (1,), (1.0,), 0.0)
        both = ChannelRealization((0.3 + 0.1j, 0.7j), (0, 1), (0.5, 0.5), 0.5)
        ya = apply(wave, cha).samples
        yb = apply(SampledWaveform(x, 16), ChannelRealization((0.7j,), (1,), (1.0,))).samples
        y = apply(wave, both).samples
        ya = np.pad(ya, (0, len(y) - len(ya)))
        np.testing.assert_allclose(y, ya + yb, atol=1e-12)

    def test_delay_shifts_and_extends(self):
        x = np.arange(8, dtype=complex)
        wave = SampledWaveform(x, 8)
        ch = ChannelRealization((1.0,), (3,), (1.0,))
        out = apply(wave, ch)
        assert len(out) == 11
        np.testing.assert_array_equal(out.samples[:3], 0)
        np.testing.assert_array_equal(out.samples[3:], x)

    def test_chip_delay_scales_with_oversampling(self):
        x = np.arange(32, dtype=complex)
        out = apply(SampledWaveform(x, 32), ChannelRealization((1.0,), (2,), (1.0,)), M=8)
        assert len(out) == 32 + 8  # 2 chips at 4 samples per chip
        np.testing.assert_array_equal(out.samples[8:], x)

    def test_full_symbol_delay_rejected(self):
        wave = SampledWaveform(np.ones(8, dtype=complex), 8)
        with pytest.raises(ConfigError):
            apply(wave, ChannelRealization((1.0,), (8,), (1.0,)))

    def test_mean_received_energy_is_preserved(self):
        cfg = GmConfig(32, (32,), 1)
        wave = transmit([GmSymbolParams(32, 7)], cfg)
        rng = np.random.default_rng(8)
        acc = 0.0
        n = 4000
        for _ in range(n):
            ch = draw_selective(3, 1.0, rng)
            acc += apply(wave, ch, 32).energy()
        assert abs(acc / n / wave.energy() - 1.0) < 0.05


class TestMatchedOutputVariance:
    """The variance of the genie matched-filter output over fading draws
    splits into a tap-power term plus the delay-leakage term, and the
    leakage predictor reproduces the Monte Carlo residual."""

    @staticmethod
    def _mc_variance(alpha, M, powers, delays, n_draws, seed):
        cfg = GmConfig(M, (alpha,) if alpha else (0,), 1)
        sym = GmSymbolParams(alpha, 0)
        wave = transmit([sym, sym], cfg)
        rolled = np.stack([np.roll(wave.samples[:M], d) for d in delays])
        rng = np.random.default_rng(seed)
        amp = np.sqrt(np.array(powers) / 2)
        y = np.empty(n_draws)
        for k in range(n_draws):
            z = rng.standard_normal(2 * len(powers)).view(complex)
            gains = amp * z
            ch = ChannelRealization(tuple(gains), tuple(delays), tuple(powers))
            rx = apply(wave, ch, M)
            window = rx.samples[M : 2 * M]
            h = gains @ rolled
            y[k] = np.vdot(h, window).real / M
        return float(np.mean(y)), float(np.var(y))

    def test_window_equals_cyclic_shift_combination(self):
        # a repeated symbol makes the second window a cyclic mixture of
        # shifted copies, which is what the leakage model assumes
        cfg = GmConfig(16, (16,), 1)
        wave = transmit([GmSymbolParams(16, 5)] * 2, cfg)
        ch = ChannelRealization((0.6, 0.8j), (0, 2), (0.5, 0.5), 1.0)
        rx = apply(wave, ch, 16)
        s = wave.samples[:16]
        expect = 0.6 * np.roll(s, 0) + 0.8j * np.roll(s, 2)
        np.testing.assert_allclose(rx.samples[16:32], expect, atol=1e-12)

    def test_tone_two_tap_variance(self):
        powers, delays = (0.5, 0.5), (0, 1)
        mean, var = self._mc_variance(0, 64, powers, delays, 30_000, seed=11)
        assert abs(mean - 1.0) < 0.02
        lk = leakage_variance(GmSymbolParams(0, 0), 64, ChannelRealization((1.0, 0.0), delays, powers))
        assert abs(lk - 0.5) < 1e-12
        split = sum(p**2 for p in powers) + lk
        assert abs(var - split) < 0.05 * split

    def test_full_chirp_gets_delay_diversity(self):
        powers, delays = (0.5, 0.5), (0, 1)
        mean, var = self._mc_variance(64, 64, powers, delays, 30_000, seed=12)
        assert abs(mean - 1.0) < 0.02
        lk = leakage_variance(GmSymbolParams(64, 0), 64, ChannelRealization((1.0, 0.0), delays, powers))
        split = sum(p**2 for p in powers) + lk
        assert abs(var - split) < 0.05 * split
        assert var < 0.65  # roughly halved versus the tone's 1.0
