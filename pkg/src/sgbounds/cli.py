"""Command-line front end.

Subcommands: ``norm``, ``norm-table``, ``bound {binary,mary}``, ``exact``,
``simulate``, ``mary``, ``compare``. JSON reports carry the full input
configuration under ``"config"``; table commands write CSV (header row, '.'
decimals, 12 significant digits). Exit codes: 0 success, 2 invalid input,
3 numerical failure.

Range flags take ``start:stop[:step]``; ``start`` is always included and
``stop`` is included when it falls on the grid. The default seed comes from
``$SGBOUNDS_SEED`` (0 if unset).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import bounds, distributions, subgauss, testing
from .errors import SolverError, ValidationError
from .verify import verify_binary, verify_mary

SEED_ENV = "SGBOUNDS_SEED"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def parse_range(text: str, integer: bool = False) -> list:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ValidationError(f"range {text!r} must look like start:stop[:step]")
    try:
        nums = [int(p) if integer else float(p) for p in parts]
    except ValueError as exc:
        raise ValidationError(f"range {text!r} has a non-numeric field") from exc
    start, stop = nums[0], nums[1]
    step = nums[2] if len(nums) == 3 else 1
    if not all(math.isfinite(v) for v in (start, stop, step)):
        raise ValidationError(f"range {text!r} must be finite")
    if step <= 0:
        raise ValidationError(f"range step must be positive, got {step!r}")
    if stop < start:
        raise ValidationError(f"range {text!r} is empty")
    if integer:
        return list(range(start, stop + 1, step))
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [float(f"{start + k * step:.12g}") for k in range(count)]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    return obj


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc: dict, args):
    _emit(json.dumps(_jsonable(doc), indent=2) + "\n", args.out)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _emit_table(header, rows, args):
    if args.format == "json":
        _emit_json({"config": _config(args), "rows": [dict(zip(header, r)) for r in rows]}, args)
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([_fmt(v) for v in r])
    _emit(buf.getvalue(), args.out)


def _config(args) -> dict:
    skip = {"handler", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _load_hypotheses(paths):
    files = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            files.extend(sorted(p.glob("*.json")))
        else:
            files.append(p)
    if len(files) < 2:
        raise ValidationError("need at least two hypothesis files")
    return [str(f) for f in files], [distributions.load(f) for f in files]


def _kl_matrix(hyps):
    return np.array([[distributions.kl(a, b) for b in hyps] for a in hyps])


# -- subcommands -------------------------------------------------------------


def cmd_norm(args):
    fit = subgauss.solve_norm(args.alpha, args.tol)
    _emit_json({**asdict(fit), "config": _config(args)}, args)


def cmd_norm_table(args):
    alphas = parse_range(args.alphas)
    fits = subgauss.norm_table(alphas, args.tol)
    _emit_table(["alpha", "sigma", "s_star"], [(f.alpha, f.sigma, f.s_star) for f in fits], args)


def cmd_bound_binary(args):
    if args.p0 or args.p1:
        if not (args.p0 and args.p1):
            raise ValidationError("--p0 and --p1 go together")
        if args.kl is not None:
            raise ValidationError("give either --kl or --p0/--p1, not both")
        p0, p1 = distributions.load(args.p0), distributions.load(args.p1)
        kl_10, kl_01 = distributions.kl(p1, p0), distributions.kl(p0, p1)
    elif args.kl is not None:
        kl_10, kl_01 = args.kl, args.kl_01
    else:
        raise ValidationError("need --kl or --p0/--p1")
    report = bounds.subgauss_binary(args.alpha, args.n, kl_10, kl_01)
    doc = asdict(report)
    if kl_01 is not None:
        doc["beta_floor_implicit"] = bounds.subgauss_binary_symmetric(
            args.alpha, args.n, kl_01, args.resolution
        )
    doc["config"] = _config(args)
    _emit_json(doc, args)


def _mary_report_doc(report):
    doc = asdict(report)
    doc["fano_applicable"] = report.fano_applicable
    return doc


def cmd_bound_mary(args):
    sources = [args.kl_matrix is not None, args.hypotheses is not None, args.m is not None]
    if sum(sources) != 1:
        raise ValidationError("give exactly one of --kl-matrix, --hypotheses or --m/--delta")
    if args.m is not None:
        if args.delta is None:
            raise ValidationError("--m needs --delta")
        if args.m < 2:
            raise ValidationError("--m must be >= 2")
        kl = np.full((args.m, args.m), float(args.delta))
        np.fill_diagonal(kl, 0.0)
        delta = None
    else:
        if args.kl_matrix is not None:
            text = args.kl_matrix
            if Path(text).is_file():
                text = Path(text).read_text()
            try:
                kl = np.array(json.loads(text), dtype=float)
            except (json.JSONDecodeError, ValueError, TypeError) as exc:
                raise ValidationError(f"--kl-matrix is not a JSON matrix: {exc}") from exc
        else:
            _, hyps = _load_hypotheses(args.hypotheses)
            kl = _kl_matrix(hyps)
        delta = args.delta
    alphas = None
    if args.alphas is not None:
        try:
            alphas = [float(a) for a in args.alphas.split(",")]
        except ValueError as exc:
            raise ValidationError(f"--alphas must be comma-separated reals: {exc}") from exc
    report = bounds.mary_bounds(kl, args.n, alphas, delta)
    _emit_json({**_mary_report_doc(report), "config": _config(args)}, args)


def _binary_run(args, rates, p0, p1):
    report = bounds.subgauss_binary(
        rates.alpha, args.n, distributions.kl(p1, p0), distributions.kl(p0, p1)
    )
    validity = verify_binary(rates, report)
    doc = asdict(rates)
    doc["half_width"] = rates.half_width
    doc["c_prime"] = testing.BinaryTestConfig(args.c, args.n).c_prime
    doc["bounds"] = asdict(report)
    doc["validity"] = {**asdict(validity), "all_ok": validity.all_ok}
    doc["config"] = _config(args)
    _emit_json(doc, args)


def cmd_exact(args):
    p0, p1 = distributions.load(args.p0), distributions.load(args.p1)
    rates = testing.exact_binary(p0, p1, testing.BinaryTestConfig(args.c, args.n))
    _binary_run(args, rates, p0, p1)


def cmd_simulate(args):
    p0, p1 = distributions.load(args.p0), distributions.load(args.p1)
    cfg = testing.BinaryTestConfig(args.c, args.n)
    rates = testing.simulate_binary(p0, p1, cfg, args.trials, args.seed, args.jobs)
    _binary_run(args, rates, p0, p1)


def cmd_mary(args):
    files, hyps = _load_hypotheses(args.hypotheses)
    cm = testing.confusion_matrix(hyps, args.n, args.trials, args.seed, args.jobs)
    kl = _kl_matrix(hyps)
    relaxed = bounds.mary_bounds(kl, args.n)
    posterior = bounds.mary_bounds(kl, args.n, cm.alpha_vector)
    v_relaxed, v_post = verify_mary(cm, relaxed), verify_mary(cm, posterior)
    doc = {
        "hypothesis_files": files,
        "mode": cm.mode,
        "trials": cm.trials,
        "confusion_matrix": cm.matrix,
        "alpha_vector": cm.alpha_vector,
        "alpha_max": cm.alpha_max,
        "alpha_half_widths": cm.alpha_half_widths,
        "tie_rate": cm.tie_rate,
        "bounds": _mary_report_doc(relaxed),
        "theorem3_aposteriori": posterior.theorem3,
        "validity": {
            **{k: v for k, v in v_relaxed.ok.items()},
            "theorem3_aposteriori": v_post.ok["theorem3"],
            "slack": v_relaxed.slack,
            "all_ok": v_relaxed.all_ok and v_post.all_ok,
        },
        "config": _config(args),
    }
    _emit_json(doc, args)


def cmd_compare(args):
    ms = parse_range(args.m_range, integer=True)
    ns = parse_range(args.n_range, integer=True)
    if ms[0] < 2 or ns[0] < 1:
        raise ValidationError("M must be >= 2 and n >= 1")
    rows = bounds.dominance_map(ms, ns, args.delta)
    _emit_table(
        ["M", "n", "uniform_delta", "fano", "winner"],
        [(r.M, r.n, r.uniform_delta, r.fano, r.winner) for r in rows],
        args,
    )


# -- parser ------------------------------------------------------------------


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="sgbounds",
        description="Sub-Gaussian error bounds for hypothesis testing.",
        epilog="Ranges use start:stop[:step]; stop is included when on the grid.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, fmt=None):
        p.add_argument("--out", help="write to this file instead of stdout")
        if fmt:
            p.add_argument("--format", choices=["json", "csv"], default=fmt)
        return p

    p = common(sub.add_parser("norm", help="sub-Gaussian norm of a test indicator"))
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--tol", type=float, default=subgauss.DEFAULT_TOL)
    p.set_defaults(handler=cmd_norm)

    p = common(sub.add_parser("norm-table", help="norm over a grid of alphas"), fmt="csv")
    p.add_argument("--alphas", required=True, help="start:stop:step")
    p.add_argument("--tol", type=float, default=subgauss.DEFAULT_TOL)
    p.set_defaults(handler=cmd_norm_table)

    p_bound = sub.add_parser("bound", help="evaluate closed-form bounds")
    bsub = p_bound.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    p = common(bsub.add_parser("binary", help="Pinsker and sub-Gaussian binary bounds"))
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kl", type=float, help="D(P1 || P0) in nats")
    p.add_argument("--kl-01", type=float, help="D(P0 || P1) in nats (implicit beta floor)")
    p.add_argument("--p0", help="JSON distribution file for H0")
    p.add_argument("--p1", help="JSON distribution file for H1")
    p.add_argument("--resolution", type=float, default=1e-4)
    p.set_defaults(handler=cmd_bound_binary)

    p = common(bsub.add_parser("mary", help="M-ary bounds and Fano"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, help="number of hypotheses (with --delta)")
    p.add_argument("--delta", type=float, help="uniform bound on pairwise KL")
    p.add_argument("--kl-matrix", help="JSON matrix, inline or as a file path")
    p.add_argument("--hypotheses", nargs="+", help="directory or files of JSON specs")
    p.add_argument("--alphas", help="comma-separated per-hypothesis error rates")
    p.set_defaults(handler=cmd_bound_mary)

    for name, handler, needs_trials in (
        ("exact", cmd_exact, False),
        ("simulate", cmd_simulate, True),
    ):
        p = common(sub.add_parser(name, help=f"{name} binary error rates"))
        p.add_argument("--p0", required=True)
        p.add_argument("--p1", required=True)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--c", type=float, default=0.0)
        if needs_trials:
            p.add_argument("--trials", type=int, required=True)
            p.add_argument("--seed", type=int, default=_default_seed())
            p.add_argument("--jobs", type=int, default=1)
        p.set_defaults(handler=handler)

    p = common(sub.add_parser("mary", help="M-ary confusion matrix (exact unless --trials)"))
    p.add_argument("--hypotheses", nargs="+", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=cmd_mary)

    p = common(sub.add_parser("compare", help="uniform-delta bound vs Fano"), fmt="csv")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--m-range", default="3:50")
    p.add_argument("--n-range", default="1:100")
    p.set_defaults(handler=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "jobs", 1) is not None and getattr(args, "jobs", 1) < 1:
        print("sgbounds: error: --jobs must be >= 1", file=sys.stderr)
        return 2
    try:
        args.handler(args)
    except ValidationError as exc:
        print(f"sgbounds: error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"sgbounds: numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
