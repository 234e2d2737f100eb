import csv
import json
import math

import numpy as np
import pytest

from gmphy import (
    ConfigError,
    EfficiencyPoint,
    ExperimentConfig,
    GmConfig,
    InfeasibleError,
    config_hash,
    efficiency_sweep,
    resource_efficiency,
    run_ser_campaign,
    shannon_bound,
    wilson_interval,
    write_curve_csv,
    write_summary_json,
)
from gmphy.harness import _crossing_db


class TestShannonBound:
    def test_unit_eta(self):
        lin, db = shannon_bound(1.0)
        assert abs(lin - 1.0) < 1e-12
        assert abs(db) < 1e-12

    def test_half_eta(self):
        lin, db = shannon_bound(0.5)
        assert abs(lin - 1.5) < 1e-12
        assert abs(db - 10 * math.log10(1.5)) < 1e-12

    def test_wideband_limit(self):
        _, db = shannon_bound(1e9)
        assert abs(db - 10 * math.log10(math.log(2))) < 1e-6

    def test_monotone_decreasing(self):
        vals = [shannon_bound(e)[0] for e in (0.25, 0.5, 1, 2, 8, 64)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_validation(self):
        with pytest.raises(ConfigError):
            shannon_bound(0.0)


class TestResourceEfficiency:
    def test_default_passband(self):
        cfg = GmConfig(128, (-2, 0, 2, 128, -128, 4, -4, 64), 1)
        u, eta = resource_efficiency(cfg)
        assert abs(u - 10 / 128) < 1e-12
        assert abs(eta - 12.8) < 1e-12

    def test_branch_bits_raise_u(self):
        narrow = GmConfig(128, (0,), 1)
        wide = GmConfig(128, (-2, 0, 2, 128, -128, 4, -4, 64), 1)
        u1, _ = resource_efficiency(narrow)
        u2, _ = resource_efficiency(wide)
        assert abs(u2 / u1 - 10 / 7) < 1e-12

    def test_wider_passband_lowers_u(self):
        cfg = GmConfig(128, (0,), 1)
        u_nom, _ = resource_efficiency(cfg)
        u_wide, _ = resource_efficiency(cfg, w_pass_dof=256.0)
        assert abs(u_wide - u_nom / 2) < 1e-12
        with pytest.raises(ConfigError):
            resource_efficiency(cfg, w_pass_dof=64.0)


class TestWilson:
    def test_pinned_values(self):
        lo, hi = wilson_interval(10, 100)
        assert abs(lo - 0.055228) < 1e-5
        assert abs(hi - 0.174367) < 1e-5

    def test_degenerate_counts(self):
        lo, hi = wilson_interval(0, 50)
        assert lo == 0.0
        assert hi > 0.0
        lo, hi = wilson_interval(50, 50)
        assert hi == 1.0
        assert lo < 1.0

    def test_validation(self):
        with pytest.raises(ConfigError):
            wilson_interval(5, 0)
        with pytest.raises(ConfigError):
            wilson_interval(6, 5)


class TestExperimentConfig:
    def test_defaults(self):
        exp = ExperimentConfig(GmConfig(8, (0,), 1))
        assert exp.channel == "awgn"
        assert exp.eb_n0_db == (0.0, 2.0, 4.0, 6.0, 8.0)

    def test_preset_parsing(self):
        ExperimentConfig(GmConfig(8, (0,), 1), channel="flat")
        ExperimentConfig(GmConfig(8, (0,), 1), channel="selective(3, 1.5)")
        with pytest.raises(ConfigError):
            ExperimentConfig(GmConfig(8, (0,), 1), channel="rician")

    def test_selective_constraints(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(GmConfig(8, (0,), 2), channel="selective(3,1.0)")
        with pytest.raises(ConfigError):
            ExperimentConfig(GmConfig(8, (0,), 1), channel="selective(8,1.0)")

    def test_stopping_rule_validation(self):
        with pytest.raises(InfeasibleError):
            ExperimentConfig(GmConfig(8, (0,), 1), min_errors=100, max_symbols=50)
        with pytest.raises(ConfigError):
            ExperimentConfig(GmConfig(8, (0,), 1), eb_n0_db=())
        with pytest.raises(ConfigError):
            ExperimentConfig(GmConfig(8, (0,), 1), burst_symbols=0)

    def test_from_dict(self):
        exp = ExperimentConfig.from_dict(
            {"M": 8, "alpha_set": [-8, 8], "eb_n0_db": [4], "label": "pair"}
        )
        assert exp.cfg.alpha_set == (-8, 8)
        assert exp.label == "pair"
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"alpha_set": [0]})
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"M": 8, "bogus": 1})


class TestCampaign:
    def _exp(self, **kw):
        base = dict(
            cfg=GmConfig(8, (0,), 1),
            eb_n0_db=(6.0,),
            min_errors=30,
            max_symbols=20_000,
            seed=7,
        )
        base.update(kw)
        return ExperimentConfig(**base)

    def test_reproducible(self):
        a = run_ser_campaign(self._exp())
        b = run_ser_campaign(self._exp())
        assert a == b
        c = run_ser_campaign(self._exp(seed=8))
        assert c != a

    def test_noiseless_is_error_free(self):
        rows = run_ser_campaign(
            self._exp(eb_n0_db=(float("inf"),), min_errors=1, max_symbols=512)
        )
        assert rows[0]["n_errors"] == 0
        assert rows[0]["n_symbols"] == 512
        assert rows[0]["ser"] == 0.0

    def test_stops_at_min_errors(self):
        rows = run_ser_campaign(self._exp(eb_n0_db=(0.0,), min_errors=25))
        r = rows[0]
        assert r["n_errors"] >= 25
        # one burst past the threshold at most
        assert r["n_errors"] < 25 + 64 + 1
        assert r["ci_lo"] <= r["ser"] <= r["ci_hi"]

    def test_ser_nonincreasing_in_snr(self):
        rows = run_ser_campaign(
            self._exp(eb_n0_db=(0.0, 4.0, 8.0), min_errors=150, max_symbols=60_000)
        )
        sers = [r["ser"] for r in rows]
        assert sers[0] > sers[1] > sers[2]

    def test_bit_errors_bounded_by_symbol_errors(self):
        rows = run_ser_campaign(self._exp(eb_n0_db=(2.0,)))
        r = rows[0]
        assert r["n_bit_errors"] >= r["n_errors"]  # a symbol error flips >= 1 bit
        assert r["n_bit_errors"] <= r["n_errors"] * 3
        assert abs(r["ber"] - r["n_bit_errors"] / r["n_bits"]) < 1e-12

    def test_flat_fading_is_slower(self):
        awgn_rows = run_ser_campaign(self._exp(eb_n0_db=(10.0,), min_errors=40))
        flat_rows = run_ser_campaign(
            self._exp(eb_n0_db=(10.0,), min_errors=40, channel="flat")
        )
        assert flat_rows[0]["ser"] > 3 * awgn_rows[0]["ser"]

    def test_selective_channel_runs(self):
        exp = ExperimentConfig(
            GmConfig(8, (0, 8), 1),
            channel="selective(2,1.0)",
            eb_n0_db=(12.0,),
            min_errors=10,
            max_symbols=4_000,
            burst_symbols=32,
            seed=3,
        )
        rows = run_ser_campaign(exp)
        assert rows[0]["n_symbols"] <= 4_000
        assert 0 <= rows[0]["ser"] <= 1


class TestCrossing:
    def _rows(self, ebs, sers, n=10_000):
        return [
            {"eb_n0_db": e, "ser": s, "n_symbols": n} for e, s in zip(ebs, sers)
        ]

    def test_exact_hit(self):
        rows = self._rows([0, 2, 4], [0.1, 0.01, 0.001])
        assert abs(_crossing_db(rows, 0.01) - 2.0) < 1e-12

    def test_log_linear_interpolation(self):
        rows = self._rows([0, 2], [0.1, 0.001])
        # halfway in log SER: sqrt(0.1 * 0.001) = 0.01 at 1.0 dB
        assert abs(_crossing_db(rows, 0.01) - 1.0) < 1e-12

    def test_first_point_already_below(self):
        rows = self._rows([3, 5], [0.005, 0.0005])
        assert _crossing_db(rows, 0.01) == 3.0

    def test_zero_count_floor(self):
        rows = self._rows([0, 2], [0.1, 0.0], n=1000)
        # the zero becomes 0.5/1000, keeping the interpolation finite
        x = _crossing_db(rows, 0.01)
        assert 0 < x < 2

    def test_unreachable_target(self):
        rows = self._rows([0, 2], [0.5, 0.2])
        with pytest.raises(InfeasibleError):
            _crossing_db(rows, 1e-3)


class TestEfficiencySweep:
    def test_single_point(self):
        exp = ExperimentConfig(
            GmConfig(8, (0,), 1),
            eb_n0_db=(2.0, 5.0, 8.0, 11.0),
            min_errors=60,
            max_symbols=50_000,
            seed=1,
            label="fsk8",
        )
        pts = efficiency_sweep([exp], target_ser=1e-2)
        assert len(pts) == 1
        p = pts[0]
        assert isinstance(p, EfficiencyPoint)
        assert p.label == "fsk8"
        assert p.channel == "awgn"
        assert abs(p.eta - 8 / 3) < 1e-12
        assert 2.0 < p.epsilon_db < 11.0
        # noncoherent orthogonal keying stays above the Shannon trade-off
        assert p.epsilon_db > shannon_bound(p.eta)[1]

    def test_target_validation(self):
        with pytest.raises(ConfigError):
            efficiency_sweep([], target_ser=0.0)
        with pytest.raises(ConfigError):
            efficiency_sweep([], target_ser=1.0)
        assert efficiency_sweep([], target_ser=0.5) == []


class TestArtifacts:
    def test_config_hash_stable_and_sensitive(self):
        a = ExperimentConfig(GmConfig(8, (0,), 1))
        b = ExperimentConfig(GmConfig(8, (0,), 1))
        c = ExperimentConfig(GmConfig(8, (0,), 1), seed=1)
        assert config_hash(a) == config_hash(b)
        assert config_hash(a) != config_hash(c)
        assert len(config_hash(a)) == 16

    def test_curve_csv_round_trip(self, tmp_path):
        rows = [
            {"eb_n0_db": 0.0, "ser": 0.25, "n_symbols": 100},
            {"eb_n0_db": 2.0, "ser": 0.125, "n_symbols": 200},
        ]
        path = tmp_path / "curve.csv"
        write_curve_csv(path, rows, meta={"channel": "awgn", "seed": 0})
        text = path.read_text()
        assert text.startswith("# channel=awgn\n# seed=0\n")
        body = [ln for ln in text.splitlines() if not ln.startswith("#")]
        parsed = list(csv.DictReader(body))
        assert len(parsed) == 2
        assert float(parsed[1]["ser"]) == 0.125

    def test_curve_csv_rejects_empty(self, tmp_path):
        with pytest.raises(ConfigError):
            write_curve_csv(tmp_path / "x.csv", [])

    def test_summary_json(self, tmp_path):
        path = tmp_path / "s.json"
        write_summary_json(path, {"ser": 0.01}, meta={"label": "x"})
        obj = json.loads(path.read_text())
        assert obj == {"ser": 0.01, "label": "x"}
