"""Command-line entry point: ``saddlebounds <subcommand> ...``.

Every subcommand also accepts ``--run-config FILE``, a JSON object whose keys
are option names (dashes or underscores); explicit flags override it.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bounds import METHODS, bounds_for, compute_bounds, containment
from .errors import ConfigError, SaddleBoundsError
from .indicators import IndicatorSet, compute_indicator_set
from .minres import convergence_envelope, minres
from .mmio import load_system, save_system
from .polynomials import GammaAssignment, roots_U
from .randgen import SuiteConfig, random_rect_system, random_system, run_suite, write_suite_csv, write_suite_svg
from .saddle_core import assemble_full, build_inexact_chain, validate_system
from .spectrum import preconditioned_spectrum

DEFAULTS = {
    "analyze": {"approx": "exact", "method": "auto", "out": None, "tol": 1e-10},
    "bounds": {"method": "auto", "format": "json", "out": None},
    "suite": {"n": 2, "grid": "table1", "runs": 10, "seed": 42, "out": None, "svg": None,
              "workers": None, "base_dim": 50, "jitter": 10, "stride": 1},
    "solve": {"approx": "exact", "tol": 1e-14, "maxit": 2000, "history": None, "out": None},
    "poly-roots": {"degree": None, "json": False, "precision": 4},
    "generate": {"n": 1, "seed": 1, "base_dim": 50, "jitter": 10, "zero_tail": False,
                 "rect": False, "prefix": ""},
}
METHOD_CHOICES = ["auto", *METHODS]


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


def _paths(value) -> list[str]:
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [p for p in str(value).split(",") if p]


def _require_readable(paths) -> None:
    for p in paths:
        if not os.path.isfile(p) or not os.access(p, os.R_OK):
            raise ConfigError(f"cannot read input file {p}")


def _require_writable(*paths) -> None:
    for p in paths:
        if p is None:
            continue
        parent = Path(p).resolve().parent
        if not parent.is_dir() or not os.access(parent, os.W_OK):
            raise ConfigError(f"cannot write output file {p}")


def _strategies(text, n_levels: int):
    items = text if isinstance(text, list) else [s for s in str(text).split(",") if s]
    if len(items) == 1:
        return items * n_levels
    if len(items) != n_levels:
        raise ConfigError(f"--approx lists {len(items)} strategies for {n_levels} levels")
    return items


def _load_checked_system(opts, tol=1e-10):
    diag, off = _paths(opts["blocks"]), _paths(opts["offdiag"])
    _require_readable(diag + off)
    system = load_system(diag, off)
    report = validate_system(system, tol)
    if not report.passed:
        names = ", ".join(f"{c.name} ({c.detail or c.value})" for c in report.failures)
        raise ConfigError(f"system fails validation: {names}")
    return system


# ---------------------------------------------------------------------------
# subcommands


def cmd_analyze(opts) -> int:
    if not opts.get("blocks") or not opts.get("offdiag"):
        raise ConfigError("analyze needs --blocks and --offdiag")
    _require_writable(opts["out"])
    system = _load_checked_system(opts, opts["tol"])
    method = opts["method"]
    if method in ("n2-rect", "n2-closed") and system.N != 2:
        raise ConfigError(f"--method {method} requires an N = 2 system, got N = {system.N}")
    if method == "n2-rect" and not system.rect_tail:
        raise ConfigError("--method n2-rect requires a system whose last block grows")
    chain = build_inexact_chain(system, _strategies(opts["approx"], system.N + 1))
    ind = compute_indicator_set(system, chain)
    bounds = bounds_for(ind, method)
    spec = preconditioned_spectrum(system, chain)
    check = containment(bounds, spec.eigenvalues)
    doc = {
        "system": {"N": system.N, "dims": list(system.dims), "rect_tail": system.rect_tail},
        "strategies": [str(s) for s in chain.strategies],
        "indicators": ind.to_dict(),
        "bounds": bounds.to_dict(),
        "spectrum": spec.to_dict(),
        "containment": check.to_dict(),
    }
    if opts.get("table"):
        if opts["out"]:
            Path(opts["out"]).write_text(_dump(doc))
        sys.stdout.write(ind.table())
    else:
        _emit(_dump(doc), opts["out"])
    return 0 if check.passed else 1


def _bounds_csv(bounds) -> str:
    header = ["neg_lb", "neg_ub", "pos_lb", "pos_ub"]
    values = list(bounds.endpoints)
    if bounds.extra is not None:
        header += ["extra_lo", "extra_hi"]
        values += list(bounds.extra)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerow([repr(float(v)) for v in values])
    return buf.getvalue()


def cmd_bounds(opts) -> int:
    if not opts.get("config"):
        raise ConfigError("bounds needs --config indicators.json")
    _require_readable([opts["config"]])
    _require_writable(opts["out"])
    try:
        ind = IndicatorSet.from_json(Path(opts["config"]).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{opts['config']}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
    ind.validate()
    method = opts["method"]
    if method in ("n2-rect", "n2-closed") and ind.N != 2:
        raise ConfigError(f"--method {method} requires N = 2 indicators, got N = {ind.N}")
    bounds = bounds_for(ind, method)
    status = 0
    doc = bounds.to_dict()
    if method == "bruteforce":
        linear = compute_bounds(ind)
        dev = float(np.max(np.abs(linear.endpoints - bounds.endpoints)))
        doc["agreement"] = {"linear": list(linear.endpoints), "max_endpoint_deviation": dev,
                            "passed": dev <= 1e-10}
        status = 0 if dev <= 1e-10 else 1
    text = _bounds_csv(bounds) if opts["format"] == "csv" else _dump(doc)
    _emit(text, opts["out"])
    return status


def cmd_suite(opts) -> int:
    _require_writable(opts["out"], opts["svg"])
    config = SuiteConfig.from_grid(
        int(opts["n"]), opts["grid"], runs=int(opts["runs"]), seed=int(opts["seed"]),
        base_dim=int(opts["base_dim"]), jitter=int(opts["jitter"]), stride=int(opts["stride"]),
    )
    workers = None if opts["workers"] is None else int(opts["workers"])
    result = run_suite(config, workers=workers)
    csv_text = write_suite_csv(result)
    if opts["out"]:
        Path(opts["out"]).write_text(csv_text)
    if opts["svg"]:
        write_suite_svg(result, opts["svg"])
    sys.stdout.write(_dump(result.summary()))
    return 0 if result.passed else 1


def cmd_solve(opts) -> int:
    if not opts.get("blocks") or not opts.get("offdiag"):
        raise ConfigError("solve needs --blocks and --offdiag")
    _require_writable(opts["out"], opts["history"])
    system = _load_checked_system(opts)
    chain = build_inexact_chain(system, _strategies(opts["approx"], system.N + 1))
    x_true = np.ones(system.total_dim)
    b = assemble_full(system) @ x_true
    report = minres(system, chain, b, float(opts["tol"]), int(opts["maxit"]))
    doc = report.to_dict()
    doc["strategies"] = [str(s) for s in chain.strategies]
    doc["max_error_vs_ones"] = float(np.max(np.abs(report.x - x_true)))
    del doc["wall_time"]  # keeps the report byte-stable across reruns
    try:
        ind = compute_indicator_set(system, chain)
        bounds = bounds_for(ind)
        env = [convergence_envelope(bounds, k) for k in range(len(report.history))]
        doc["bounds"] = bounds.to_dict()
        doc["envelope_respected"] = all(
            h <= e * (1 + 1e-6) for h, e in zip(report.history, env) if e >= 1e-10
        )
    except SaddleBoundsError as exc:
        doc["bounds_error"] = str(exc)
    if opts["history"]:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration", "relative_residual"])
        for k, h in enumerate(report.history):
            w.writerow([k, repr(float(h))])
        Path(opts["history"]).write_text(buf.getvalue())
    _emit(_dump(doc), opts["out"])
    return 0 if report.converged else 1


def cmd_poly_roots(opts) -> int:
    if opts.get("gammaE") is None:
        raise ConfigError("poly-roots needs --gammaE")
    gE = _floats(opts["gammaE"]) if isinstance(opts["gammaE"], str) else list(opts["gammaE"])
    gR_raw = opts.get("gammaR") or ""
    gR = _floats(gR_raw) if isinstance(gR_raw, str) else list(gR_raw)
    degree = len(gE) if opts["degree"] is None else int(opts["degree"])
    if not 1 <= degree <= len(gE) or len(gR) < degree - 1:
        raise ConfigError(
            f"degree {degree} needs {degree} gammaE and {degree - 1} gammaR values"
        )
    gamma = GammaAssignment(gE[:degree], gR[:degree - 1])
    rs = roots_U(degree, gamma)
    if opts["json"]:
        sys.stdout.write(_dump(rs.to_dict()))
    else:
        p = int(opts["precision"])
        sys.stdout.write(",".join(f"{r:.{p}f}" for r in rs.roots) + "\n")
    return 0


def cmd_generate(opts) -> int:
    if not opts.get("out_dir"):
        raise ConfigError("generate needs --out-dir")
    if opts["rect"]:
        system = random_rect_system(int(opts["seed"]))
    else:
        system = random_system(int(opts["n"]), int(opts["seed"]), zero_tail=bool(opts["zero_tail"]),
                               base_dim=int(opts["base_dim"]), jitter=int(opts["jitter"]))
    diag, off = save_system(system, opts["out_dir"], opts["prefix"])
    sys.stdout.write(_dump({"blocks": [str(p) for p in diag], "offdiag": [str(p) for p in off],
                            "dims": list(system.dims)}))
    return 0


COMMANDS = {
    "analyze": cmd_analyze,
    "bounds": cmd_bounds,
    "suite": cmd_suite,
    "solve": cmd_solve,
    "poly-roots": cmd_poly_roots,
    "generate": cmd_generate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saddlebounds",
        description="Eigenvalue bounds for block-diagonally preconditioned multiple saddle-point systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--run-config", help="JSON file with default option values")
        return p

    p = add("analyze", "indicators, bounds and exact spectrum of a Matrix Market system")
    p.add_argument("--blocks", help="comma-separated A_0..A_N .mtx files")
    p.add_argument("--offdiag", help="comma-separated B_1..B_N .mtx files")
    p.add_argument("--approx", help="strategy per level, or one for all (exact, jacobi, "
                                    "scaled_identity:c, window:lo:hi)")
    p.add_argument("--method", choices=METHOD_CHOICES)
    p.add_argument("--tol", type=float, help="validation tolerance")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.add_argument("--table", action="store_const", const=True,
                   help="print the indicator intervals as a table on stdout")

    p = add("bounds", "bounds from an indicator JSON document")
    p.add_argument("--config", help="indicator set JSON")
    p.add_argument("--method", choices=METHOD_CHOICES)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    p.add_argument("--out")

    p = add("suite", "random verification suite over an indicator grid")
    p.add_argument("--n", type=int)
    p.add_argument("--grid", choices=["table1", "smoke"])
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--svg", help="scatter plot output path")
    p.add_argument("--workers", type=int, help="worker processes (env SADDLEBOUNDS_THREADS)")
    p.add_argument("--base-dim", type=int)
    p.add_argument("--jitter", type=int)
    p.add_argument("--stride", type=int, help="keep every stride-th combination")

    p = add("solve", "preconditioned MINRES with an all-ones true solution")
    p.add_argument("--blocks")
    p.add_argument("--offdiag")
    p.add_argument("--approx")
    p.add_argument("--tol", type=float)
    p.add_argument("--maxit", type=int)
    p.add_argument("--history", help="CSV path for the residual history")
    p.add_argument("--out")

    p = add("poly-roots", "roots of U_k for given parameters")
    p.add_argument("--gammaE")
    p.add_argument("--gammaR")
    p.add_argument("--degree", type=int)
    p.add_argument("--json", action="store_const", const=True)
    p.add_argument("--precision", type=int, help="decimals in CSV output")

    p = add("generate", "write a random system as Matrix Market files")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir")
    p.add_argument("--base-dim", type=int)
    p.add_argument("--jitter", type=int)
    p.add_argument("--zero-tail", action="store_const", const=True)
    p.add_argument("--rect", action="store_const", const=True, help="N = 2 with a growing last block")
    p.add_argument("--prefix")
    return parser


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge defaults < run-config file < explicit flags."""
    opts = dict(DEFAULTS.get(args.command, {}))
    if args.run_config:
        _require_readable([args.run_config])
        try:
            file_opts = json.loads(Path(args.run_config).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.run_config}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(file_opts, dict):
            raise ConfigError(f"{args.run_config}: expected a JSON object")
        opts.update({k.replace("-", "_"): v for k, v in file_opts.items()})
    for key, value in vars(args).items():
        if key in ("command", "run_config") or value is None:
            continue
        opts[key] = value
    return opts


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve_options(args)
        return COMMANDS[args.command](opts)
    except SaddleBoundsError as exc:
        sys.stderr.write(f"saddlebounds {args.command}: error: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
