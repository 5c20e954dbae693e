"""Command-line front end.

Subcommands: wht, capacity, distinguish, detect, repeat, simulate.

Exit status is 0 on success, 2 when an input violates a precondition
(malformed file, out-of-range parameter) and 1 on usage errors. JSON output
embeds a ``manifest`` object; CSV output starts with a ``# manifest:`` line.
Neither contains a timestamp unless ``SOURCE_DATE_EPOCH`` is set or
``--stamp`` is given, so reruns with the same flags and seed are
byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import platform
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import channel as ch
from . import distinguisher as dist
from . import fileio, sampler, sources
from .walsh import Distribution, WalshSpectrum, fwht, inverse_fwht, l2_norm_sq, sei, top_coefficients

CSV_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _seed(text: str) -> int:
    s = int(text, 0)
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text}")
    return s


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="walshdetect", description="Walsh-spectrum signal detection toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--stamp", action="store_true", help="record a timestamp in the manifest")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    w = sub.add_parser("wht", help="Walsh transform of a signal/distribution file")
    w.add_argument("input")
    w.add_argument("--inverse", action="store_true", help="treat input as a spectrum and invert")
    w.add_argument("-o", "--output", help="spectrum file to write (default: stdout)")
    w.add_argument("--json", dest="json_out", help="write {top_k, sei, l2_sq} summary here ('-' = stdout)")
    w.add_argument("--top", type=int, default=5)

    c = sub.add_parser("capacity", help="binary channel capacity")
    c.add_argument("--channel", choices=("bsc", "asym"), required=True)
    c.add_argument("--d", type=float, required=True, help="bias; BSC crossover is (1-d)/2")
    c.add_argument("--method", choices=("exact", "approx", "ba"), required=True)
    c.add_argument("--tol", type=float, default=1e-10)
    c.add_argument("--max-iter", type=int, default=100_000)

    d = sub.add_parser("distinguish", help="Monte Carlo error of the optimal distinguisher")
    d.add_argument("--kind", choices=dist.KINDS, required=True)
    d.add_argument("--d", type=float, required=True)
    d.add_argument("--n", type=int, dest="N", help="samples per trial (default: required N)")
    d.add_argument("--trials", type=int, required=True)
    d.add_argument("--seed", type=_seed, required=True)
    d.add_argument("--sweep", type=_float_list, help="multipliers k: evaluate at k*N")
    d.add_argument("--format", choices=("json", "csv"), default="json")
    d.add_argument("--workers", type=int, default=1)
    d.add_argument("-o", "--output")

    t = sub.add_parser("detect", help="decide signal vs noise from a sample file")
    t.add_argument("--samples", required=True)
    t.add_argument("--mode", choices=("classical", "generic"), required=True)
    t.add_argument("--mask", type=lambda s: int(s, 0))
    t.add_argument("--d", type=float)
    t.add_argument("--budget", type=int, help="sample budget N (default: number of samples)")
    t.add_argument("-o", "--output")

    r = sub.add_parser("repeat", help="recurrence of top Walsh coefficients across runs")
    r.add_argument("--source", required=True)
    r.add_argument("--n-samples", type=int, required=True)
    r.add_argument("--runs", type=int, required=True)
    r.add_argument("--top", type=int, default=1)
    r.add_argument("--seed", type=_seed, required=True)
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("-o", "--output")

    s = sub.add_parser("simulate", help="error-rate curves over d and N as CSV")
    s.add_argument("--kind", choices=dist.KINDS, required=True)
    s.add_argument("--d", type=_float_list, required=True, help="comma-separated biases")
    group = s.add_mutually_exclusive_group()
    group.add_argument("--n", type=_int_list, dest="N", help="explicit sample sizes")
    group.add_argument("--multipliers", type=_float_list, default=[1.0],
                       help="multiples of the required N for each d")
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=_seed, required=True)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("-o", "--output")
    return p


def _manifest(argv: Sequence[str], seed: Optional[int], inputs: Sequence[str], stamp: bool) -> dict:
    m = {
        "command": ["walshdetect", *argv],
        "seed": seed,
        "versions": {
            "walshdetect": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "inputs": [fileio.describe_input(path) for path in inputs],
    }
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        m["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(int(epoch)))
    elif stamp:
        m["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return m


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            raise ValueError(f"refusing to serialize non-finite value {v!r}")
        return v
    return obj


def _dump_json(payload: dict) -> str:
    return json.dumps(_clean(payload), indent=2, allow_nan=False) + "\n"


def _dump_csv(columns: Sequence[str], rows: Sequence[dict], manifest: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# walshdetect-csv v{CSV_VERSION}\n")
    buf.write("# manifest: " + json.dumps(_clean(manifest), sort_keys=True, allow_nan=False) + "\n")
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt_cell(row[k]) for k in columns})
    return buf.getvalue()


def _fmt_cell(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            raise ValueError(f"refusing to serialize non-finite value {v!r}")
        return repr(v)
    return v


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _is_distribution(n: int, values) -> bool:
    try:
        Distribution(n, values)
    except ValueError:
        return False
    return True


def cmd_wht(args, argv) -> None:
    n, values = fileio.read_values(args.input)
    if args.inverse:
        spectrum = WalshSpectrum(n, values)
        out = inverse_fwht(spectrum).values
        is_pmf = _is_distribution(n, out)
    else:
        is_pmf = _is_distribution(n, values)
        spectrum = fwht(Distribution(n, values) if is_pmf else values)
        out = spectrum.coeffs
    buf = io.StringIO()
    fileio.write_values(buf, n, out)
    _write(buf.getvalue(), args.output)
    if args.json_out:
        summary = {
            "n": n,
            "inverse": args.inverse,
            "is_distribution": is_pmf,
            "top_k": [{"mask": m, "coeff": c} for m, c in top_coefficients(spectrum, max(1, args.top))],
            "sei": sei(spectrum),
            "l2_sq": l2_norm_sq(spectrum),
            "manifest": _manifest(argv, None, [args.input], args.stamp),
        }
        _write(_dump_json(summary), args.json_out)


def cmd_capacity(args, argv) -> None:
    d = args.d
    if args.channel == "bsc":
        crossover = (1.0 - d) / 2.0
        if args.method == "exact":
            res = ch.bsc_capacity_exact(crossover)
        elif args.method == "approx":
            res = ch.bsc_capacity_extremal(d)
        else:
            res = ch.blahut_arimoto(ch.BinaryChannel.bsc(crossover), args.tol, args.max_iter)
    else:
        if args.method == "exact":
            raise ValueError("the asymmetric channel has no closed-form capacity; use --method ba or approx")
        if args.method == "approx":
            res = ch.asym_capacity_approx(d)
        else:
            res = ch.blahut_arimoto(ch.asym_channel(d), args.tol, args.max_iter)
    payload = {"channel": args.channel, "d": d, **res.to_dict(), "manifest": _manifest(argv, None, [], args.stamp)}
    _write(_dump_json(payload), None)


DIST_COLUMNS = ("kind", "d", "N", "trials", "seed", "error_rate", "ci95", "theory", "errors_h0", "errors_h1")


def cmd_distinguish(args, argv) -> None:
    pair = dist.HypothesisPair(args.kind, args.d)
    base = args.N if args.N is not None else dist.required_samples(pair)
    sizes = dist.scaled_sizes(base, args.sweep) if args.sweep else [base]
    rows = dist.error_curve(pair, sizes, args.trials, args.seed, args.workers)
    for row in rows:
        row.update(kind=pair.kind, d=pair.d, trials=args.trials, seed=args.seed)
    manifest = _manifest(argv, args.seed, [], args.stamp)
    if args.format == "csv":
        _write(_dump_csv(DIST_COLUMNS, rows, manifest), args.output)
        return
    if args.sweep:
        payload = {"kind": pair.kind, "d": pair.d, "trials": args.trials, "seed": args.seed,
                   "rows": [{k: r[k] for k in ("N", "error_rate", "ci95", "theory", "errors_h0", "errors_h1")}
                            for r in rows]}
    else:
        payload = {k: rows[0][k] for k in DIST_COLUMNS}
    payload["manifest"] = manifest
    _write(_dump_json(payload), args.output)


def cmd_detect(args, argv) -> None:
    n, samples = fileio.read_samples(args.samples)
    if samples.size == 0:
        raise ValueError(f"{args.samples}: no samples after the header")
    budget = args.budget if args.budget is not None else int(samples.size)
    if args.mode == "classical":
        if args.mask is None or args.d is None:
            raise ValueError("classical mode needs --mask and --d")
        cfg = sampler.DetectionConfig(n, budget, sampler.CLASSICAL, args.mask, args.d)
        report = sampler.classical_detect(samples, cfg)
    else:
        mode = sampler.GENERIC_N1 if n == 1 else sampler.GENERIC_GENERAL
        report = sampler.detect(samples, sampler.DetectionConfig(n, budget, mode), n=n)
    payload = report.to_dict()
    payload["manifest"] = _manifest(argv, None, [args.samples], args.stamp)
    _write(_dump_json(payload), args.output)


REPEAT_COLUMNS = ("mask", "recurrence", "frequency", "top1", "mean_coeff", "std_coeff")


def cmd_repeat(args, argv) -> None:
    src = sources.parse_source_spec(args.source)
    report = sampler.repeat_experiment(src, args.n_samples, args.runs, args.top, args.seed, args.workers)
    rows = [dataclasses.asdict(s) for s in report.masks]
    inputs = [src.path] if src.path else []
    manifest = _manifest(argv, args.seed, inputs, args.stamp)
    _write(_dump_csv(REPEAT_COLUMNS, rows, manifest), args.output)


def cmd_simulate(args, argv) -> None:
    rows = []
    for d in args.d:
        pair = dist.HypothesisPair(args.kind, d)
        required = dist.required_samples(pair)
        if args.N:
            sizes, mults = args.N, [n / required for n in args.N]
        else:
            sizes = dist.scaled_sizes(required, args.multipliers)
            mults = list(args.multipliers)
        for row, k in zip(dist.error_curve(pair, sizes, args.trials, args.seed, args.workers), mults):
            row.update(kind=pair.kind, d=pair.d, trials=args.trials, seed=args.seed,
                       required_N=required, multiplier=float(k))
            rows.append(row)
    columns = ("kind", "d", "required_N", "multiplier") + DIST_COLUMNS[2:]
    _write(_dump_csv(columns, rows, _manifest(argv, args.seed, [], args.stamp)), args.output)


COMMANDS = {
    "wht": cmd_wht,
    "capacity": cmd_capacity,
    "distinguish": cmd_distinguish,
    "detect": cmd_detect,
    "repeat": cmd_repeat,
    "simulate": cmd_simulate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    try:
        COMMANDS[args.command](args, argv)
    except (ValueError, OSError) as exc:
        print(f"walshdetect {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
