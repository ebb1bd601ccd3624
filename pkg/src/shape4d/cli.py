"""Command-line front end: ``shape4d <command> ...``.

Exit codes: 0 success, 2 usage or parse error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import os
import shlex
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .constellation import LabeledConstellation, extract_first_orthant, first_orthant_points
from .fileio import ConstellationParseError, atomic_write, dumps, load
from .formats import BUILTIN_NAMES, builtin, pm_qam
from .gmi import AwgnSpec, default_threads, gmi_mc, gmi_quadrature_2d
from .metrics import energy_profile, sed_spectrum
from .optimize import OptimizerConfig, binary_switching, optimize_os, optimize_unconstrained
from .ps import ccdm_composition, ccdm_rate_loss, entropy_bits, mb_distribution_for_entropy, pm_qam_priors
from .sweep import SweepResult

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


def _resolve(spec: str) -> LabeledConstellation:
    if spec.lower() in BUILTIN_NAMES:
        return builtin(spec)
    if os.path.exists(spec):
        return load(spec)
    raise UsageError(f"{spec!r} is neither a built-in format ({', '.join(BUILTIN_NAMES)}) nor a file")


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    if not step > 0:
        raise UsageError("step must be positive")
    if stop < start:
        return np.empty(0)
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 10)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _emit(args, result: SweepResult, out=None) -> None:
    result.timestamp = not args.no_timestamp
    result.seed = args.seed
    text = result.render(args.format)
    target = out if out is not None else args.out
    if target:
        atomic_write(target, text)
    else:
        sys.stdout.write(text)


def _result(args, columns) -> SweepResult:
    return SweepResult(columns=columns, command=args.command_line)


# ---------------------------------------------------------------- commands ---


def cmd_constellation(args) -> int:
    c = _resolve(args.source)
    name = c.name or Path(args.source).stem
    if args.export:
        atomic_write(args.export, dumps(c))
    if args.sed_spectrum:
        res = _result(args, ["sed", "total_pairs", "hd1_pairs"])
        for sed, tot, hd1 in sed_spectrum(c, args.bin_tol).bins:
            res.add(sed=sed, total_pairs=tot, hd1_pairs=hd1)
    elif args.levels:
        res = _result(args, ["energy", "multiplicity"])
        for e, k in energy_profile(c, args.level_tol).levels:
            res.add(energy=e, multiplicity=k)
    else:
        prof = energy_profile(c, args.level_tol)
        spec = sed_spectrum(c, args.bin_tol)
        res = _result(args, ["format", "M", "N", "m", "es", "papr_db", "energy_variance",
                             "n_levels", "msed", "msed_pairs", "orthant_symmetric"])
        res.add(format=name, M=c.M, N=c.N, m=c.m, es=c.mean_energy, papr_db=prof.papr_db,
                energy_variance=prof.variance, n_levels=prof.n_levels, msed=spec.msed,
                msed_pairs=spec.msed_pairs, orthant_symmetric=int(extract_first_orthant(c).is_symmetric))
    _emit(args, res)
    return EXIT_OK


def cmd_gmi_sweep(args) -> int:
    formats = [f for f in args.formats.split(",") if f]
    consts = [_resolve(f) for f in formats]
    snrs = _grid(args.snr_start, args.snr_stop, args.snr_step)
    method = "maxlog" if args.maxlog else "exact"
    res = _result(args, ["format", "snr_db", "gmi", "mi", "stderr", "n_samples", "method"])
    for f, c in zip(formats, consts):
        for s in snrs:
            if args.quadrature:
                r = gmi_quadrature_2d(c, AwgnSpec(float(s)), args.nodes)
            else:
                r = gmi_mc(c, AwgnSpec(float(s)), args.samples, args.seed, method, threads=args.threads)
            res.add(format=f, **r.as_row())
    _emit(args, res)
    return EXIT_OK


def cmd_optimize(args) -> int:
    if not args.out:
        raise UsageError("optimize needs --out for the optimized constellation file")
    c = _resolve(args.init)
    cfg = OptimizerConfig(
        target_snr_db=args.snr, mc_samples=args.samples, max_iterations=args.iterations,
        step=args.step, decay=args.decay, seed=args.seed,
        accept_sigma=args.accept_sigma if args.accept_sigma is not None
        else (2.0 if args.mode == "unconstrained" else 0.0),
    )
    if args.mode == "os":
        report = extract_first_orthant(c)
        seed = report.seed if report.is_symmetric else first_orthant_points(c)
        _, trace = optimize_os(seed, cfg)
    elif args.mode == "unconstrained":
        _, trace = optimize_unconstrained(c, cfg)
    else:
        _, trace = binary_switching(c, cfg)
    out = trace.final_constellation
    before = gmi_mc(c, AwgnSpec(args.snr), args.eval_samples, args.seed + 1, threads=args.threads)
    after = gmi_mc(out, AwgnSpec(args.snr), args.eval_samples, args.seed + 1, threads=args.threads)
    trace_path = args.trace or (str(args.out) + ".trace.csv")
    atomic_write(args.out, dumps(out))
    atomic_write(trace_path, trace.to_csv())
    res = _result(args, ["mode", "snr_db", "gmi_initial", "gmi_final", "improvement", "stderr", "n_samples"])
    res.add(mode=args.mode, snr_db=args.snr, gmi_initial=before.gmi, gmi_final=after.gmi,
            improvement=after.gmi - before.gmi, stderr=after.stderr, n_samples=after.n_samples)
    _emit(args, res, out=args.summary or "")
    return EXIT_OK


def _parse_override(item: str):
    if "=" not in item:
        raise UsageError(f"override {item!r} must look like key=value")
    k, v = item.split("=", 1)
    try:
        val = int(v)
    except ValueError:
        try:
            val = float(v)
        except ValueError:
            raise UsageError(f"override {item!r} needs a numeric value") from None
    return k.strip(), val


def cmd_fiber_sweep(args) -> int:
    from .fiber import FiberParams, LinkConfig, load_config, run_link
    from .fiber.signal import PropagationError

    if args.config:
        try:
            link, fiber = load_config(Path(args.config).read_text(encoding="utf-8"))
        except (ValueError, TypeError) as exc:
            raise UsageError(f"{args.config}: {exc}") from None
    else:
        link, fiber = LinkConfig(), FiberParams()
    for item in args.set or []:
        k, v = _parse_override(item)
        if hasattr(fiber, k):
            fiber = replace(fiber, **{k: v})
        elif hasattr(link, k):
            link = replace(link, **{k: v})
        else:
            raise UsageError(f"unknown parameter {k!r}")
    link = replace(link, seed=args.seed)
    formats = [f for f in args.formats.split(",") if f]
    consts = [_resolve(f) for f in formats]
    if args.spans:
        points = [(link.launch_power_dbm, n) for n in _ints(args.spans)]
    else:
        powers = _grid(args.power_start, args.power_stop, args.power_step)
        points = [(float(p), link.n_spans) for p in powers]
    res = _result(args, ["format", "launch_dbm", "total_launch_dbm", "n_spans", "channel",
                         "eff_snr_db", "gmi"])
    for f, c in zip(formats, consts):
        for p, n in points:
            cfg = replace(link, launch_power_dbm=p, n_spans=n)
            try:
                r = run_link(cfg, fiber, c, threads=args.threads)
            except PropagationError as exc:
                print(f"error: {f} at {p} dBm, {n} spans: {exc}", file=sys.stderr)
                return EXIT_NUMERIC
            res.add(format=f, launch_dbm=p, total_launch_dbm=cfg.total_power_dbm, n_spans=n,
                    channel=cfg.center_channel, eff_snr_db=r.eff_snr_db, gmi=r.gmi)
    _emit(args, res)
    return EXIT_OK


def cmd_rate_loss(args) -> int:
    amps = _floats(args.amplitudes)
    if args.distribution:
        p = np.array(_floats(args.distribution))
        if len(p) != len(amps) or np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
            raise UsageError("distribution must match the amplitudes and sum to 1")
    else:
        n_dims = 4
        h_amp = args.entropy / n_dims - 1.0
        try:
            p = mb_distribution_for_entropy(amps, h_amp)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    blocks = _ints(args.blocklengths)
    if any(n < 1 for n in blocks):
        raise UsageError("blocklengths must be positive")
    gmi = None
    if args.snr is not None:
        bits = int(np.log2(len(amps))) + 1
        if 1 << (bits - 1) != len(amps):
            raise UsageError("AIR needs a power-of-two amplitude count")
        c = pm_qam(bits)
        pr = pm_qam_priors(c, p)
        c = c.scaled(np.sqrt(2.0 / float(pr @ c.energies)))
        gmi = gmi_quadrature_2d(c, AwgnSpec(args.snr, probabilities=pr), args.nodes).gmi
    cols = ["n", "composition", "entropy_bits_per_amp", "rate_loss_bits_per_amp"]
    if gmi is not None:
        cols += ["snr_db", "gmi", "air_n"]
    res = _result(args, cols)
    for n in blocks:
        rl = ccdm_rate_loss(p, n, args.reference)
        row = dict(n=n, composition=" ".join(map(str, ccdm_composition(p, n))),
                   entropy_bits_per_amp=entropy_bits(p), rate_loss_bits_per_amp=rl)
        if gmi is not None:
            row.update(snr_db=args.snr, gmi=gmi, air_n=gmi - 4 * rl)
        res.add(**row)
    _emit(args, res)
    return EXIT_OK


# ------------------------------------------------------------------ parser ---


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="root random seed (default 0)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    p.add_argument("--threads", type=int, default=default_threads(),
                   help="worker threads (default: $SHAPE4D_THREADS or 1)")
    p.add_argument("--no-timestamp", action="store_true", help="omit the generation-time comment")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shape4d", description="Multidimensional constellation shaping toolkit.")
    ap.add_argument("--version", action="version", version=f"shape4d {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constellation", help="structural metrics of a format or file")
    p.add_argument("source", help="built-in name or constellation file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--metrics", action="store_true", help="PAPR, energy variance, MSED summary (default)")
    g.add_argument("--sed-spectrum", action="store_true", help="exact SED spectrum rows")
    g.add_argument("--levels", action="store_true", help="energy levels with multiplicities")
    p.add_argument("--export", help="also save the constellation to this file")
    p.add_argument("--bin-tol", type=float, default=1e-6, help="absolute SED bin tolerance")
    p.add_argument("--level-tol", type=float, default=1e-3, help="relative energy-level tolerance")
    _common(p)
    p.set_defaults(func=cmd_constellation)

    p = sub.add_parser("gmi-sweep", help="GMI and MI versus SNR over AWGN")
    p.add_argument("--formats", default="4d-os128", help="comma-separated names or files")
    p.add_argument("--snr-start", type=float, default=6.0)
    p.add_argument("--snr-stop", type=float, default=14.0)
    p.add_argument("--snr-step", type=float, default=0.5)
    p.add_argument("--samples", type=int, default=1_000_000, help="Monte-Carlo symbols per point")
    p.add_argument("--maxlog", action="store_true", help="max-log LLRs instead of exact")
    p.add_argument("--quadrature", action="store_true", help="Gauss-Hermite rule (2D-product formats only)")
    p.add_argument("--nodes", type=int, default=64, help="quadrature nodes per dimension")
    _common(p)
    p.set_defaults(func=cmd_gmi_sweep)

    p = sub.add_parser("optimize", help="GMI-maximizing shaping or labeling")
    p.add_argument("--init", required=True, help="initial format (name or file)")
    m = p.add_mutually_exclusive_group(required=True)
    m.add_argument("--os", dest="mode", action="store_const", const="os", help="orthant-symmetric ascent")
    m.add_argument("--unconstrained", dest="mode", action="store_const", const="unconstrained",
                   help="perturb all points")
    m.add_argument("--labels", dest="mode", action="store_const", const="labels", help="binary switching only")
    p.add_argument("--snr", type=float, default=9.5, help="target SNR in dB")
    p.add_argument("--iterations", type=int, default=40, help="passes (perturbations when unconstrained)")
    p.add_argument("--samples", type=int, default=20_000, help="batch size per evaluation")
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--decay", type=float, default=0.5)
    p.add_argument("--accept-sigma", type=float,
                   help="paired standard errors a move must beat (default 2 unconstrained, else 0)")
    p.add_argument("--eval-samples", type=int, default=200_000, help="samples for the before/after report")
    p.add_argument("--trace", help="trace CSV path (default: <out>.trace.csv)")
    p.add_argument("--summary", help="write the summary table here instead of stdout")
    _common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("fiber-sweep", help="multi-span WDM simulation of the centre channel")
    p.add_argument("--config", help="JSON link configuration")
    p.add_argument("--formats", default="4d-os128")
    p.add_argument("--power-start", type=float, default=-2.0, help="launch power per channel, dBm")
    p.add_argument("--power-stop", type=float, default=4.0)
    p.add_argument("--power-step", type=float, default=1.0)
    p.add_argument("--spans", help="comma-separated span counts (distance sweep at the config power)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config field")
    _common(p)
    p.set_defaults(func=cmd_fiber_sweep)

    p = sub.add_parser("rate-loss", help="CCDM rate loss and finite-length AIR")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--entropy", type=float, default=7.0, help="PS-QAM entropy, bit per 4D symbol")
    src.add_argument("--distribution", help="comma-separated amplitude probabilities")
    p.add_argument("--amplitudes", default="1,3", help="amplitude alphabet per real dimension")
    p.add_argument("--blocklengths", default="32,64,128")
    p.add_argument("--reference", choices=("composition", "target"), default="composition",
                   help="entropy used in H - k/n")
    p.add_argument("--snr", type=float, help="also report GMI and AIR_n of the shaped PM-QAM at this SNR")
    p.add_argument("--nodes", type=int, default=64)
    _common(p)
    p.set_defaults(func=cmd_rate_loss)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.command_line = "shape4d " + " ".join(shlex.quote(a) for a in argv)
    try:
        return args.func(args)
    except ConstellationParseError as exc:
        print(f"error: {args_source(args)}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FloatingPointError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def args_source(args) -> str:
    return getattr(args, "source", None) or getattr(args, "init", None) or "input"


if __name__ == "__main__":
    sys.exit(main())
