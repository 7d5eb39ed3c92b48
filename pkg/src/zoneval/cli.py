"""Command-line front end.

Commands: fit, describe, whatif, hypothesis, synth, reproduction-check.
The shared flags (--input, --output, --spec, --alpha, --seed, --format)
can also come from environment variables with the ZONEVAL_ prefix
(ZONEVAL_INPUT, ZONEVAL_ALPHA, ...); an explicit flag wins.  Every
command is deterministic given its configuration, exits 0 on success,
and prints a single-line diagnostic to stderr on failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import render
from .design import ModelSpec, build_design_matrix, default_model_spec, read_model_spec
from .diagnostics import (
    HIGH_CORRELATION_THRESHOLD,
    WATCHLIST_PAIRS,
    correlation_matrix,
    descriptive_stats,
    high_correlation_pairs,
    zoning_variance_share,
)
from .inference import DEFAULT_ALPHA, fit_table
from .option_value import FittedModel, rezone_counterfactual
from .parcels import ZONES, clean, load_parcels, write_parcels
from .reference import consistency_check
from .synth import (
    calibrated_noise_sigma,
    default_true_model,
    generate_parcels,
    write_generation_log,
)

ENV_PREFIX = "ZONEVAL_"


def _env(name: str) -> str | None:
    return os.environ.get(ENV_PREFIX + name.upper())


def _add_common(parser: argparse.ArgumentParser, *, needs_input: bool) -> None:
    env_input = _env("input")
    parser.add_argument(
        "--input",
        default=env_input,
        required=needs_input and env_input is None,
        help="parcel CSV path",
    )
    parser.add_argument("--output", default=_env("output"), help="write the report here instead of stdout")
    parser.add_argument("--spec", default=_env("spec"), help="model spec file (default: built-in model)")
    env_alpha = _env("alpha")
    parser.add_argument(
        "--alpha",
        type=float,
        default=float(env_alpha) if env_alpha else DEFAULT_ALPHA,
        help="significance level (default 0.10)",
    )
    env_seed = _env("seed")
    parser.add_argument(
        "--seed",
        type=int,
        default=int(env_seed) if env_seed else 0,
        help="generator seed (synth)",
    )
    parser.add_argument(
        "--format",
        choices=render.FORMATS,
        default=_env("format") or None,
        help="report format (default: text; whatif defaults to csv)",
    )


def _load_spec(args) -> ModelSpec:
    return read_model_spec(args.spec) if args.spec else default_model_spec()


def _load_clean_table(args):
    table = load_parcels(args.input)
    return clean(table)


def _emit(text: str, args) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_fit(args) -> int:
    cleaned, report = _load_clean_table(args)
    spec = _load_spec(args)
    _, _, inference = fit_table(cleaned, spec, args.alpha)
    text = render.render_fit(inference, args.format or "text")
    if (args.format or "text") == "text":
        text = (
            f"Input: {args.input} ({report.rows_in} rows, {report.rows_dropped} dropped in cleaning)\n"
            + text
        )
    _emit(text, args)
    return 0


def cmd_describe(args) -> int:
    cleaned, _report = _load_clean_table(args)
    spec = _load_spec(args)
    stats = descriptive_stats(cleaned, spec)
    design = build_design_matrix(cleaned, spec)
    blocks = correlation_matrix(design)
    flagged = [
        pair for block in blocks for pair in high_correlation_pairs(block, args.corr_threshold)
    ]
    watch = []
    lookup = {}
    for block in blocks:
        for i, a in enumerate(block.labels):
            for j, b in enumerate(block.labels):
                lookup[(a, b)] = float(block.values[i, j])
    for a, b in WATCHLIST_PAIRS:
        if (a, b) in lookup:
            watch.append((a, b, lookup[(a, b)]))
    _emit(render.render_describe(stats, blocks, flagged, watch, args.format or "text"), args)
    return 0


def cmd_whatif(args) -> int:
    cleaned, _report = _load_clean_table(args)
    spec = _load_spec(args)
    model = FittedModel.fit(cleaned, spec, args.alpha)
    if args.pins:
        wanted = [pin.strip() for pin in args.pins.split(",") if pin.strip()]
        by_pin = {p.pin: p for p in cleaned.rows}
        missing = [pin for pin in wanted if pin not in by_pin]
        if missing:
            raise ValueError(f"unknown pins: {', '.join(missing)}")
        parcels = [by_pin[pin] for pin in wanted]
    else:
        parcels = list(cleaned.rows)
    reports = [rezone_counterfactual(model, p, args.to_zone) for p in parcels]
    _emit(render.render_whatif(reports, args.format or "csv"), args)
    return 0


def cmd_hypothesis(args) -> int:
    cleaned, _report = _load_clean_table(args)
    share = zoning_variance_share(cleaned, args.alpha)
    _emit(render.render_hypothesis(share, args.format or "text"), args)
    return 0


def cmd_synth(args) -> int:
    if args.n < 1:
        raise ValueError(f"--n must be >= 1, got {args.n}")
    if not args.output:
        raise ValueError("synth requires --output for the generated CSV")
    truth = default_true_model(seed=args.seed, noise_sigma=args.noise_sigma)
    if args.target_r2 is not None:
        # probe at the same (seed, n) so the emitted sample itself
        # carries the requested explained-variance share
        sigma = calibrated_noise_sigma(truth, args.target_r2, probe_n=args.n)
        truth = default_true_model(seed=args.seed, noise_sigma=sigma)
    table, log = generate_parcels(truth, args.n)
    write_parcels(table, args.output)
    log_path = args.log_output or (str(args.output) + ".log.json")
    write_generation_log(log, log_path)
    sys.stdout.write(
        f"wrote {len(table)} parcels to {args.output} (seed {truth.seed}, "
        f"noise sigma {truth.noise_sigma:.6f}); log: {log_path}\n"
    )
    return 0


def cmd_reproduction_check(args) -> int:
    report = consistency_check()
    _emit(render.render_consistency(report, args.format or "text"), args)
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zoneval",
        description="Hedonic property-valuation toolkit with zoning counterfactuals",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit the log-value model and print the coefficient table")
    _add_common(p_fit, needs_input=True)
    p_fit.set_defaults(func=cmd_fit)

    p_desc = sub.add_parser("describe", help="descriptive statistics and correlation blocks")
    _add_common(p_desc, needs_input=True)
    p_desc.add_argument(
        "--corr-threshold",
        type=float,
        default=HIGH_CORRELATION_THRESHOLD,
        help="|r| at or above this is flagged (default 0.8)",
    )
    p_desc.set_defaults(func=cmd_describe)

    p_what = sub.add_parser("whatif", help="rezoning counterfactual (option value) rows")
    _add_common(p_what, needs_input=True)
    p_what.add_argument("--to-zone", required=True, choices=ZONES, help="target zone")
    p_what.add_argument("--pins", help="comma-separated pins (default: all parcels)")
    p_what.set_defaults(func=cmd_whatif)

    p_hyp = sub.add_parser("hypothesis", help="zoning variance-share decomposition")
    _add_common(p_hyp, needs_input=True)
    p_hyp.set_defaults(func=cmd_hypothesis)

    p_syn = sub.add_parser("synth", help="generate a synthetic parcel CSV with a known truth")
    _add_common(p_syn, needs_input=False)
    p_syn.add_argument("--n", type=int, required=True, help="number of parcels")
    p_syn.add_argument("--noise-sigma", type=float, default=0.35, help="log-value noise std dev")
    p_syn.add_argument(
        "--target-r2", type=float, default=None, help="calibrate noise to this population R-square"
    )
    p_syn.add_argument("--log-output", default=None, help="sidecar log path (default <output>.log.json)")
    p_syn.set_defaults(func=cmd_synth)

    p_rep = sub.add_parser(
        "reproduction-check",
        help="verify the published coefficient table is internally consistent",
    )
    _add_common(p_rep, needs_input=False)
    p_rep.set_defaults(func=cmd_reproduction_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        message = " ".join(str(exc).split())
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
