"""Command-line interface: ``noisyqss {run,sweep,channels,pure}``.

Exit codes: 0 success, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import protocol
from .channels import CATALOGUE, catalogue_json, classify_channel_structure, standard_channel
from .errors import QssError
from .protocol import ProtocolConfig, run_campaign
from .states import ENCODINGS, Encoding

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3

COLUMNS = ("p", "alpha", "error_rate", "success", "bits", "empirical_success", "stderr")

HADAMARD_ALPHA = 1 / math.sqrt(2)
PRESETS = {
    "fig1": {"p_range": (0.0, 1.0, 21), "alpha_range": (0.05, 0.95, 19)},
    "fig2": {"p_range": (0.0, 1.0, 11), "alpha_values": [HADAMARD_ALPHA]},
}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Locale-independent shortest round-trip float text; empty for missing values."""
    if x is None:
        return ""
    return repr(float(x))


def grid(start: float, stop: float, steps, flag: str = "--p-range") -> list[float]:
    if steps != int(steps) or steps < 2:
        raise UsageError(f"{flag}: STEPS must be an integer >= 2")
    steps = int(steps)
    return [round(start + i * (stop - start) / (steps - 1), 12) for i in range(steps)]


def report_row(report: protocol.ProtocolReport) -> dict:
    return {
        "p": report.config.p,
        "alpha": report.config.alpha,
        "error_rate": report.analytic_error_rate,
        "success": report.analytic_success,
        "bits": report.analytic_bits,
        "empirical_success": report.empirical_success,
        "stderr": report.stderr,
    }


def render_rows(rows: Sequence[dict], fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps(list(rows), indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in COLUMNS])
    return buf.getvalue()


def emit(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def point_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1, np.uint64)[0])


def make_config(p, alpha, channel, trials, seed) -> ProtocolConfig:
    if trials > 0 and seed is None:
        raise UsageError("--seed is required when --trials > 0")
    try:
        return ProtocolConfig(p=p, alpha=alpha, channel_name=channel, trials=trials, seed=seed)
    except QssError as exc:
        raise UsageError(str(exc)) from None


def cmd_run(args) -> int:
    if not 0.0 <= args.p <= 1.0:
        raise UsageError(f"--p must lie in [0, 1], got {args.p}")
    if not 0.0 < args.alpha < 1.0:
        raise UsageError(f"--alpha must lie strictly between 0 and 1, got {args.alpha}")
    if args.trials < 0:
        raise UsageError("--trials must be non-negative")
    config = make_config(args.p, args.alpha, args.channel, args.trials, args.seed)
    report = run_campaign(config, workers=args.workers)
    if args.format == "json":
        text = report.to_json() + "\n"
    else:
        text = render_rows([report_row(report)], "csv")
    emit(text, args.output)
    return EXIT_OK


def sweep_rows(
    p_values: Sequence[float],
    alpha_values: Sequence[float],
    channel: str = "phase_damping",
    trials: int = 0,
    seed: Optional[int] = None,
    workers: int = 1,
) -> list[dict]:
    rows = []
    for i, (p, alpha) in enumerate((p, a) for p in p_values for a in alpha_values):
        s = point_seed(seed, i) if trials > 0 else None
        config = make_config(p, alpha, channel, trials, s)
        rows.append(report_row(run_campaign(config, workers=workers)))
    return rows


def cmd_sweep(args) -> int:
    preset = PRESETS.get(args.preset, {})
    p_range = args.p_range or preset.get("p_range")
    if p_range is None:
        raise UsageError("--p-range is required without --preset")
    start, stop, steps = p_range
    if not (0.0 <= start <= 1.0 and 0.0 <= stop <= 1.0):
        raise UsageError("--p-range must lie within [0, 1]")
    p_values = grid(start, stop, steps)

    if args.alpha_range is not None:
        a0, a1, an = args.alpha_range
        if not (0.0 < a0 < 1.0 and 0.0 < a1 < 1.0):
            raise UsageError("--alpha-range must lie strictly within (0, 1)")
        alpha_values = grid(a0, a1, an, "--alpha-range")
    elif "alpha_values" in preset:
        alpha_values = preset["alpha_values"]
    elif "alpha_range" in preset:
        alpha_values = grid(*preset["alpha_range"])
    else:
        raise UsageError("--alpha-range is required without --preset")

    if args.trials < 0:
        raise UsageError("--trials must be non-negative")
    rows = sweep_rows(p_values, alpha_values, args.channel, args.trials, args.seed, args.workers)
    emit(render_rows(rows, args.format), args.output)
    return EXIT_OK


def _format_matrix(m: np.ndarray) -> str:
    def c(z):
        if abs(z.imag) < 1e-15:
            return f"{z.real:.6g}"
        return f"{z.real:.6g}{z.imag:+.6g}j"

    return "[" + "; ".join(", ".join(c(z) for z in row) for row in m) + "]"


def cmd_channels(args) -> int:
    names = [args.name] if args.name else list(CATALOGUE)
    if not 0.0 <= args.param <= 1.0:
        raise UsageError(f"--param must lie in [0, 1], got {args.param}")
    if args.format == "json":
        emit(catalogue_json(args.param, names) + "\n", args.output)
        return EXIT_OK
    lines = []
    for name in names:
        ch = standard_channel(name, args.param)
        rep = classify_channel_structure(ch)
        lines.append(f"{name} (parameter {args.param:g}): {len(ch.operators)} operators")
        for i, e in enumerate(ch.operators):
            lines.append(f"  E{i} = {_format_matrix(e)}")
        lines.append(f"  cptp = {str(ch.is_cptp()).lower()}")
        lines.append(f"  all_kraus_diagonal = {str(rep.all_kraus_diagonal).lower()}")
        lines.append(f"  ghz_form_preserved = {str(rep.ghz_form_preserved).lower()}")
        lines.append(f"  coherence_factor = {rep.coherence_factor:.12g}")
    emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_pure(args) -> int:
    if args.secret is None:
        secrets = list(ENCODINGS)
    else:
        try:
            secrets = [Encoding.from_bits(args.secret)]
        except QssError as exc:
            raise UsageError(str(exc)) from None
    lines = []
    ok = 0
    for secret in secrets:
        for b in protocol.pure_protocol_branches(secret):
            lines.append(
                f"secret {secret.bits} ({secret.name}): Charlie {b.charlie_outcome}, "
                f"Bell {b.bell_outcome}, p={b.probability:.12g} -> decoded {b.decoded.bits}"
            )
        decoded = protocol.run_pure_protocol(secret)
        ok += decoded is secret
        lines.append(f"secret {secret.bits}: decoded {decoded.bits}")
    if args.secret is None:
        lines.append(f"{ok}/{len(secrets)} decoded correctly")
    emit("\n".join(lines) + "\n", None)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisyqss",
        description="Simulate GHZ-based secret sharing through noisy qubit channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, default_trials):
        sp.add_argument("--channel", default="phase_damping", choices=list(CATALOGUE))
        sp.add_argument("--trials", type=int, default=default_trials,
                        help="Monte Carlo trials per point (0 = analytic only)")
        sp.add_argument("--seed", type=int, default=None, help="required when --trials > 0")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--format", choices=("csv", "json"), default=None)
        sp.add_argument("--output", "-o", default=None, help="output file (default stdout)")

    run = sub.add_parser("run", help="run one protocol campaign and print its report")
    run.add_argument("--p", type=float, required=True, help="channel parameter in [0, 1]")
    run.add_argument("--alpha", type=float, required=True, help="Charlie's basis parameter in (0, 1)")
    common(run, protocol.DEFAULT_TRIALS)
    run.set_defaults(func=cmd_run, default_format="json")

    sweep = sub.add_parser("sweep", help="tabulate error rate, success and bits over a (p, alpha) grid")
    sweep.add_argument("--preset", choices=sorted(PRESETS), default=None)
    sweep.add_argument("--p-range", nargs=3, type=float, metavar=("START", "STOP", "STEPS"), default=None)
    sweep.add_argument("--alpha-range", nargs=3, type=float, metavar=("START", "STOP", "STEPS"), default=None)
    common(sweep, 0)
    sweep.set_defaults(func=cmd_sweep, default_format="csv")

    channels = sub.add_parser("channels", help="list catalogue channels and their structure")
    channels.add_argument("name", nargs="?", choices=list(CATALOGUE))
    channels.add_argument("--param", type=float, default=0.3)
    channels.add_argument("--format", choices=("text", "json"), default="text")
    channels.add_argument("--output", "-o", default=None)
    channels.set_defaults(func=cmd_channels)

    pure = sub.add_parser("pure", help="noise-free protocol demonstration")
    pure.add_argument("secret", nargs="?", default=None, help="two bits: 00, 01, 10 or 11")
    pure.set_defaults(func=cmd_pure)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "format", "") is None:
        args.format = args.default_format
    try:
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be at least 1")
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"noisyqss: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
