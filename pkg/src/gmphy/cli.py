"""Command-line front end.

Subcommands: spectrum, modem, preamble, ser, sweep, bound.  Every report
path writes delimited data (CSV plus a JSON summary where one makes
sense) into --out, and renders a matplotlib figure next to it unless
--no-plot is given.  Exit codes: 0 on success, 2 for configuration
errors, 3 for infeasible experiments.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import ConfigError, InfeasibleError
from .waveform import GmConfig, SampledWaveform
from .spectrum import EmissionMask, SymbolPolicy, estimate_psd, max_symbol_rate, psd_with_rho, reference_mask
from .modem import demap, detect_stream, lowpass, map_bits, transmit
from .preamble import PreambleSpec, tolerance_curve
from .harness import (
    ExperimentConfig,
    config_hash,
    efficiency_sweep,
    run_ser_campaign,
    shannon_bound,
    write_curve_csv,
    write_summary_json,
)
from . import plotting


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as e:
        raise ConfigError(f"bad integer list {text!r}") from e


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as e:
        raise ConfigError(f"bad number list {text!r}") from e


def _outdir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _load_mask(text: str) -> EmissionMask:
    if text in ("ref", "reference"):
        return reference_mask()
    return EmissionMask.from_file(text)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the random seed")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--config", default=None, help="JSON config file")
    common.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    p = argparse.ArgumentParser(prog="gmphy", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"gmphy {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", parents=[common], help="estimate a power spectrum")
    sp.add_argument("--m", type=int, default=128)
    sp.add_argument("--alpha", default="uniform", help='fixed value or "uniform"')
    sp.add_argument("--alpha-set", default="0", help="comma-separated spread factors")
    sp.add_argument("--oversample", type=int, default=8)
    sp.add_argument("--trials", type=int, default=4096)
    sp.add_argument("--rho", default="constant", help='"constant" or "pskL"')
    sp.add_argument("--mask", default=None, help='mask file, or "ref" for the shipped one')

    md = sub.add_parser("modem", parents=[common], help="encode bits or decode a waveform")
    md.add_argument("action", choices=["encode", "decode"])
    md.add_argument("--m", type=int, default=128)
    md.add_argument("--alpha-set", default="0")
    md.add_argument("--oversample", type=int, default=1)
    md.add_argument("--bits", default=None, help="0/1 string to encode")
    md.add_argument("--bits-file", default=None, help="file of 0/1 text to encode")
    md.add_argument("--hex", dest="hex_str", default=None, help="hex payload to encode")
    md.add_argument("--in", dest="infile", default=None, help="waveform CSV to decode")

    pr = sub.add_parser("preamble", parents=[common], help="frequency-error tolerance curves")
    pr.add_argument("--m", type=int, default=128)
    pr.add_argument("--alpha-p", type=float, default=None, help="chirp rate (default M)")
    pr.add_argument("--oversample", type=int, default=4)
    pr.add_argument("--repeats", type=int, default=8)
    pr.add_argument("--delta-max", type=float, default=None, help="largest offset (default M/4)")
    pr.add_argument("--steps", type=int, default=65)

    se = sub.add_parser("ser", parents=[common], help="run one error-rate campaign")
    se.add_argument("--m", type=int, default=128)
    se.add_argument("--alpha-set", default="0")
    se.add_argument("--oversample", type=int, default=1)
    se.add_argument("--channel", default="awgn")
    se.add_argument("--eb", default="0,2,4,6,8", help="comma-separated Eb/N0 grid (dB)")
    se.add_argument("--min-errors", type=int, default=200)
    se.add_argument("--max-symbols", type=int, default=10_000_000)
    se.add_argument("--burst", type=int, default=64)
    se.add_argument("--label", default="")

    sw = sub.add_parser("sweep", parents=[common], help="efficiency points from campaigns")
    sw.add_argument("--target-ser", type=float, default=None)

    bd = sub.add_parser("bound", parents=[common], help="Shannon-Hartley reference curve")
    bd.add_argument("--eta", default=None, help="comma-separated DoF-per-bit values")
    bd.add_argument("--eta-min", type=float, default=0.5)
    bd.add_argument("--eta-max", type=float, default=64.0)
    bd.add_argument("--points", type=int, default=33)
    return p


def _cmd_spectrum(args) -> int:
    out = _outdir(args)
    cfg = GmConfig(args.m, _int_list(args.alpha_set), args.oversample)
    policy_alpha = "uniform" if args.alpha == "uniform" else float(args.alpha)
    seed = 0 if args.seed is None else args.seed
    est = psd_with_rho(cfg, args.rho, policy_alpha, args.trials, seed) if args.rho != "constant" else estimate_psd(cfg, policy_alpha, args.trials, seed)

    with open(os.path.join(out, "spectrum.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["zeta", "p_cont", "p_disc"])
        w.writerows(zip(est.bin_freqs, est.p_cont, est.p_disc))
    summary = {
        "M": cfg.M,
        "alpha_policy": args.alpha,
        "rho_policy": args.rho,
        "trials": est.trials,
        "seed": seed,
        "oow": est.oow,
        "total_power": est.total_power,
    }
    mask = None
    if args.mask:
        mask = _load_mask(args.mask)
        w_sym, r_b = max_symbol_rate(cfg, mask, SymbolPolicy(policy_alpha, args.rho), spectrum=est)
        summary.update(w_sym_hz=w_sym, r_b_bits_per_s=r_b)
    write_summary_json(os.path.join(out, "spectrum.json"), summary)
    if not args.no_plot:
        plotting.save_spectrum_plot(est, os.path.join(out, "spectrum.png"), mask, summary.get("w_sym_hz"))
    print(f"oow={est.oow:.4e}" + (f" w_sym={summary['w_sym_hz']:.1f} Hz" if mask else ""))
    return 0


def _read_bits(args) -> str:
    sources = [s for s in (args.bits, args.bits_file, args.hex_str) if s is not None]
    if len(sources) != 1:
        raise ConfigError("encode needs exactly one of --bits, --bits-file, --hex")
    if args.bits is not None:
        return args.bits
    if args.bits_file is not None:
        with open(args.bits_file) as fh:
            return fh.read()
    return "".join(f"{int(c, 16):04b}" for c in args.hex_str.strip())


def _cmd_modem(args) -> int:
    out = _outdir(args)
    cfg = GmConfig(args.m, _int_list(args.alpha_set), args.oversample)
    if args.action == "encode":
        symbols = map_bits(_read_bits(args), cfg)
        wave = transmit(symbols, cfg)
        path = os.path.join(out, "waveform.csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "real", "imag"])
            w.writerows((i, z.real, z.imag) for i, z in enumerate(wave.samples))
        print(f"{len(symbols)} symbols, {len(wave)} samples -> {path}")
        return 0
    if not args.infile:
        raise ConfigError("decode needs --in")
    data = np.loadtxt(args.infile, delimiter=",", skiprows=1)
    wave = SampledWaveform(data[:, 1] + 1j * data[:, 2], cfg.rate)
    chips = lowpass(wave, cfg.M).samples.reshape(-1, cfg.M)
    a_idx, betas = detect_stream(chips, cfg)
    bits = demap(zip(a_idx, betas), cfg)
    text = "".join(str(b) for b in bits)
    with open(os.path.join(out, "bits.txt"), "w") as fh:
        fh.write(text + "\n")
    print(text)
    return 0


def _cmd_preamble(args) -> int:
    out = _outdir(args)
    alpha_p = float(args.m) if args.alpha_p is None else args.alpha_p
    if alpha_p == 0:
        raise ConfigError("the chirp preamble needs a nonzero rate")
    dmax = args.m / 4 if args.delta_max is None else args.delta_max
    deltas = np.linspace(0.0, dmax, args.steps)
    chirp = tolerance_curve(PreambleSpec(alpha_p, M=args.m, oversample=args.oversample, repeats=args.repeats), deltas)
    tone = tolerance_curve(PreambleSpec(0.0, M=args.m, oversample=args.oversample, repeats=args.repeats), deltas)
    path = os.path.join(out, "tolerance.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["delta", "chirp_peak", "chirp_lag_sym", "tone_peak"])
        w.writerows(zip(deltas, chirp[:, 1], chirp[:, 2], tone[:, 1]))
    if not args.no_plot:
        plotting.save_tolerance_plot(
            {f"chirp a={alpha_p:g}": chirp, "tone": tone},
            os.path.join(out, "tolerance.png"),
        )
    print(f"{args.steps} offsets -> {path}")
    return 0


def _experiment_from_args(args) -> ExperimentConfig:
    if args.config:
        with open(args.config) as fh:
            d = json.load(fh)
        if args.seed is not None:
            d["seed"] = args.seed
        return ExperimentConfig.from_dict(d)
    cfg = GmConfig(args.m, _int_list(args.alpha_set), args.oversample)
    return ExperimentConfig(
        cfg=cfg,
        channel=args.channel,
        eb_n0_db=_float_list(args.eb),
        min_errors=args.min_errors,
        max_symbols=args.max_symbols,
        burst_symbols=args.burst,
        seed=0 if args.seed is None else args.seed,
        label=args.label,
    )


def _cmd_ser(args) -> int:
    out = _outdir(args)
    exp = _experiment_from_args(args)
    rows = run_ser_campaign(exp)
    meta = {"config_hash": config_hash(exp), "seed": exp.seed, "channel": exp.channel, "label": exp.label}
    write_curve_csv(os.path.join(out, "ser.csv"), rows, meta)
    write_summary_json(os.path.join(out, "ser.json"), {"points": rows}, meta)
    if not args.no_plot:
        plotting.save_ser_plot({exp.label or exp.channel: rows}, os.path.join(out, "ser.png"))
    for r in rows:
        print(f"eb={r['eb_n0_db']:6.2f} dB  ser={r['ser']:.4e}  ({r['n_errors']}/{r['n_symbols']})")
    return 0


def _cmd_sweep(args) -> int:
    if not args.config:
        raise ConfigError("sweep needs --config with an experiment list")
    out = _outdir(args)
    with open(args.config) as fh:
        spec = json.load(fh)
    target = args.target_ser if args.target_ser is not None else spec.get("target_ser", 1e-2)
    exps = []
    for i, d in enumerate(spec.get("experiments", [])):
        if args.seed is not None:
            d = dict(d, seed=args.seed + i)
        exps.append(ExperimentConfig.from_dict(d))
    if not exps:
        raise ConfigError("no experiments in the sweep config")
    points = efficiency_sweep(exps, target)
    rows = [
        {
            "label": p.label,
            "channel": p.channel,
            "eta_dof_per_bit": p.eta,
            "epsilon_db": p.epsilon_db,
            "target_ser": p.target_ser,
            "shannon_db": shannon_bound(p.eta)[1],
        }
        for p in points
    ]
    meta = {"target_ser": target, "hashes": ";".join(config_hash(e) for e in exps)}
    write_curve_csv(os.path.join(out, "efficiency.csv"), rows, meta)
    write_summary_json(os.path.join(out, "efficiency.json"), {"points": rows}, meta)
    if not args.no_plot:
        plotting.save_efficiency_plot(points, os.path.join(out, "efficiency.png"))
    for r in rows:
        print(f"{r['label'] or r['channel']}: eta={r['eta_dof_per_bit']:.3f} eps={r['epsilon_db']:.2f} dB")
    return 0


def _cmd_bound(args) -> int:
    out = _outdir(args)
    if args.eta:
        etas = _float_list(args.eta)
    else:
        etas = tuple(np.geomspace(args.eta_min, args.eta_max, args.points))
    rows = []
    for eta in etas:
        lin, db = shannon_bound(eta)
        rows.append({"eta_dof_per_bit": eta, "epsilon_linear": lin, "epsilon_db": db})
        print(f"eta={eta:9.4f}  eps={lin:.6f} ({db:+.3f} dB)")
    write_curve_csv(os.path.join(out, "bound.csv"), rows)
    if not args.no_plot:
        plotting.save_bound_plot(
            [r["eta_dof_per_bit"] for r in rows],
            [r["epsilon_db"] for r in rows],
            os.path.join(out, "bound.png"),
        )
    return 0


_DISPATCH = {
    "spectrum": _cmd_spectrum,
    "modem": _cmd_modem,
    "preamble": _cmd_preamble,
    "ser": _cmd_ser,
    "sweep": _cmd_sweep,
    "bound": _cmd_bound,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except InfeasibleError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
