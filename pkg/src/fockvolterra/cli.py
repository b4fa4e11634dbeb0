"""Command line interface: ``fockvolterra <subcommand> [flags]``.

Exit status: 0 on success (for ``verify``: every check passed), 1 when a
check fails or a computation cannot be carried out, 2 for configuration or
usage errors. Flags override values from ``--config``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

import numpy as np
import yaml

from .criteria import (
    TransformWhich,
    berezin_lp_integral,
    berezin_transform_points,
    classify_symbolic,
    companion_comparison,
    criterion_integral,
)
from .fock import FockParams
from .harness.config import ConfigError, ExperimentConfig, load_config, parse_config
from .harness.report import csv_cell, emit_report, jsonable
from .harness.suites import run_suite, suite_names
from .operators import OperatorKind, SymbolPair, build_matrix, build_matrix_quadrature
from .polynomials import parse_complex
from .quadrature import AnnulusSchedule
from .spectra import convergence_diagnose

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

# entries below this magnitude are written as exact zeros in matrix dumps
ZERO_CUTOFF = 1e-300


def _shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML experiment configuration")
    p.add_argument("--alpha", type=float)
    p.add_argument("--p", type=float, help="Schatten exponent")
    p.add_argument("--g", help="symbol g as comma-separated coefficients, lowest degree first")
    p.add_argument("--psi", help="symbol psi, same format as --g")
    p.add_argument("--op", help="operator kind (Vg, Ig, Mg, IgPsi, CgPsi, VgUpperPsi, CgUpperPsi)")
    p.add_argument("--n", help="truncation size(s), comma-separated")
    p.add_argument("--tol", type=float, help="quadrature tolerance")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--no-timing", action="store_true", help="write runtime_ms as 0 for byte-identical reports")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockvolterra", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    cmds = {
        "matrix": "dump the truncated operator matrix",
        "schatten": "partial Schatten sums and the convergence verdict",
        "berezin": "Berezin-type transform at points, or its L^(p/2) integral",
        "criterion": "the exponent criterion integral",
        "classify": "exact membership decision for polynomial symbols",
        "compare": "companion comparison of I/V and C/C-upper branches",
        "verify": "run verification suites",
    }
    subs = {}
    for name, help_text in cmds.items():
        subs[name] = sp = sub.add_parser(name, help=help_text)
        _shared(sp)
    subs["matrix"].add_argument("--method", choices=("algebraic", "quadrature"), default="algebraic")
    for name in ("berezin", "criterion", "classify"):
        subs[name].add_argument("--which", default="ForI", help="ForI or ForC")
    subs["berezin"].add_argument("--w", action="append", help="evaluation point (repeatable); omit for the integral")
    subs["criterion"].add_argument("--method", choices=("symbolic", "probe"), default="symbolic")
    subs["verify"].add_argument("--suite", default="all", help="suite name, comma list, or 'all'")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    raw = cfg.to_dict()
    for key in ("alpha", "p", "g", "psi", "op"):
        if getattr(args, key) is not None:
            raw[key] = getattr(args, key)
    if args.n is not None:
        try:
            raw["Ns"] = [int(x) for x in args.n.split(",") if x.strip()]
        except ValueError:
            raise ConfigError("--n", f"expected comma-separated integers, got {args.n!r}") from None
    if args.tol is not None:
        raw["quadrature"]["tol"] = args.tol
    if args.out is not None:
        raw["output"]["path"] = args.out
    if args.format is not None:
        raw["output"]["format"] = args.format
    if args.no_timing:
        raw["timing"] = False
    return parse_config(yaml.safe_dump(raw, sort_keys=False))


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write output to {path}: {exc.strerror}") from None


def _table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([csv_cell(x) for x in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def _emit(cfg: ExperimentConfig, header, rows, obj) -> None:
    text = _table(header, rows) if cfg.output.format == "csv" else _json(obj)
    _write(text, cfg.output.path)


def _pair(cfg: ExperimentConfig) -> SymbolPair:
    return SymbolPair(cfg.g, cfg.psi)


def cmd_matrix(cfg: ExperimentConfig, args) -> int:
    kind = OperatorKind(cfg.op)
    N = cfg.Ns[-1]
    builder = build_matrix_quadrature if args.method == "quadrature" else build_matrix
    kwargs = {"tol": cfg.quadrature.tol} if args.method == "quadrature" else {}
    T = builder(kind, _pair(cfg), FockParams(cfg.alpha), N, **kwargs)
    M = np.where(np.abs(T.matrix) < ZERO_CUTOFF, 0.0, T.matrix)
    rows = [(m, n, float(M[m, n].real), float(M[m, n].imag)) for n in range(N) for m in range(N)]
    obj = {
        "op": kind.value,
        "N": N,
        "alpha": cfg.alpha,
        "g": cfg.g,
        "psi": cfg.psi,
        "entries": [list(r) for r in rows],
        "leakage": [float(x) for x in T.leakage],
        "leaky_columns": T.leaky_columns,
    }
    _emit(cfg, ["m", "n", "re", "im"], rows, obj)
    return EXIT_OK


def cmd_schatten(cfg: ExperimentConfig, args) -> int:
    rep = convergence_diagnose(
        OperatorKind(cfg.op), _pair(cfg), FockParams(cfg.alpha), cfg.p, cfg.Ns, **cfg.thresholds.as_diagnose_kwargs()
    )
    header = ["N", "p", "partial_sum", "partial_norm", "leaky_columns", "verdict", "slope", "decay_exponent", "extrapolated_limit"]
    rows = [
        (N, rep.p, s, nrm, leak, rep.verdict.value, rep.slope, rep.decay_exponent, rep.extrapolated_limit)
        for N, s, nrm, leak in zip(rep.Ns, rep.partial_sums, rep.partial_norms, rep.leaky_columns)
    ]
    _emit(cfg, header, rows, rep.to_dict())
    return EXIT_OK


def _which(args) -> TransformWhich:
    try:
        return TransformWhich.parse(args.which)
    except ValueError as exc:
        raise ConfigError("--which", str(exc)) from None


def _schedule(cfg: ExperimentConfig) -> AnnulusSchedule:
    return AnnulusSchedule(trigger=cfg.thresholds.annulus_trigger)


def _integral_row(which, res):
    norm = res.details.get("norm_estimate")
    return (which.value, res.status.value, res.value, res.error_estimate, norm, res.reason)


def cmd_berezin(cfg: ExperimentConfig, args) -> int:
    which = _which(args)
    params = FockParams(cfg.alpha)
    if args.w:
        try:
            ws = np.array([parse_complex(w) for w in args.w])
        except ValueError as exc:
            raise ConfigError("--w", str(exc)) from None
        vals = berezin_transform_points(which, _pair(cfg), params, ws, tol=cfg.quadrature.inner_tol)
        rows = [(w.real, w.imag, float(v)) for w, v in zip(ws, vals)]
        _emit(cfg, ["w_re", "w_im", "value"], rows, [{"w": [r[0], r[1]], "value": r[2]} for r in rows])
        return EXIT_OK
    res = berezin_lp_integral(which, _pair(cfg), params, cfg.p, grid_outer=_schedule(cfg), tol=cfg.quadrature.inner_tol)
    header = ["which", "status", "value", "error_estimate", "norm_estimate", "reason"]
    _emit(cfg, header, [_integral_row(which, res)], res.to_dict())
    return EXIT_OK


def cmd_criterion(cfg: ExperimentConfig, args) -> int:
    which = _which(args)
    res = criterion_integral(
        which, _pair(cfg), FockParams(cfg.alpha), cfg.p, method=args.method, tol=cfg.quadrature.tol, schedule=_schedule(cfg)
    )
    header = ["which", "status", "value", "error_estimate", "norm_estimate", "reason"]
    _emit(cfg, header, [_integral_row(which, res)], res.to_dict())
    return EXIT_OK


def cmd_classify(cfg: ExperimentConfig, args) -> int:
    which = _which(args)
    v = classify_symbolic(_pair(cfg), cfg.p, which)
    _emit(cfg, ["which", "status", "reason"], [(which.value, v.status.value, v.reason.value)], v.to_dict())
    return EXIT_OK


def cmd_compare(cfg: ExperimentConfig, args) -> int:
    rep = companion_comparison(_pair(cfg), FockParams(cfg.alpha), cfg.p, cfg.Ns, **cfg.thresholds.as_diagnose_kwargs())
    rows = []
    for branch, kind in (("I", "IgPsi"), ("V", "VgUpperPsi"), ("C", "CgPsi"), ("CU", "CgUpperPsi")):
        r = getattr(rep, f"{branch}_branch")
        rows.append((branch, kind, r.verdict.value, r.partial_sums[-1], r.slope, r.extrapolated_limit))
    header = ["branch", "op", "verdict", "partial_sum", "slope", "extrapolated_limit"]
    _emit(cfg, header, rows, rep.to_dict())
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig, args) -> int:
    try:
        names = suite_names(args.suite)
    except KeyError as exc:
        raise ConfigError("--suite", exc.args[0]) from None
    records, ok = run_suite(names, cfg)
    emit_report(records, cfg.output.format, cfg.output.path)
    failed = [r for r in records if not r.passed]
    for r in failed:
        print(f"FAIL {r.suite}/{r.check}: {r.value}", file=sys.stderr)
    print(f"{len(records) - len(failed)}/{len(records)} checks passed", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "matrix": cmd_matrix,
    "schatten": cmd_schatten,
    "berezin": cmd_berezin,
    "criterion": cmd_criterion,
    "classify": cmd_classify,
    "compare": cmd_compare,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, TypeError) as exc:
        # missing symbols, out-of-scope symbols, truncation below the degree
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
