"""Command-line front end.

Two subcommands: ``run`` executes a multi-seed experiment and writes trace
CSVs; ``summarize`` reduces a directory of traces to per-checkpoint
statistics. Options can also come from a flat key=value config file; flags
override file entries. Exit codes: 0 success, 2 usage error, 3 data error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import (
    ALGORITHMS,
    ExperimentConfig,
    UsageError,
    read_trace_csv,
    run_experiment,
    summarize,
    write_summary_csv,
)
from .oracle import DatasetFormatError

__all__ = ["main", "main_exit", "build_parser"]

# run-subcommand option names that may also appear in a config file
_RUN_KEYS = (
    "alg", "obj", "evals", "seeds", "x0", "m", "T",
    "eps", "kappa", "hess_radius", "q", "out", "jobs",
)
_RUN_DEFAULTS = {
    "seeds": "0",
    "x0": "auto",
    "m": None,
    "T": 20,
    "eps": 1e-3,
    "kappa": 0.1,
    "hess_radius": 0.05,
    "q": 10,
    "jobs": 1,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zosah",
        description="Query-counted zeroth-order optimization benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment over a list of seeds")
    run.add_argument("--alg", choices=ALGORITHMS, help="algorithm id")
    run.add_argument("--obj", help="objective id: rosenbrock or logistic:<path>")
    run.add_argument("--evals", type=int, help="function-evaluation budget per seed")
    run.add_argument("--seeds", help="comma-separated seed list (default 0)")
    run.add_argument("--x0", help="zeros | standard-rosenbrock | comma-separated floats")
    run.add_argument("--m", type=int, help="coordinates per period (even; default min(d,20))")
    run.add_argument("--T", type=int, help="steps per subspace period (default 20)")
    run.add_argument("--eps", type=float, help="finite-difference spacing (default 1e-3)")
    run.add_argument("--kappa", type=float, help="curvature floor for the PD repair (default 0.1)")
    run.add_argument("--hess-radius", dest="hess_radius", type=float,
                     help="fresh-sample circle radius (default 0.05)")
    run.add_argument("--q", type=int, help="directions per baseline gradient estimate (default 10)")
    run.add_argument("--out", help="output directory for trace CSVs")
    run.add_argument("--jobs", type=int, help="seeds run in this many threads (default 1)")
    run.add_argument("--config", help="flat key=value config file; flags override it")
    run.set_defaults(func=_cmd_run)

    summ = sub.add_parser("summarize", help="summarize trace CSVs on an eval grid")
    summ.add_argument("--in", dest="in_dir", required=True, help="directory of trace CSVs")
    summ.add_argument("--grid", type=int, default=100, help="checkpoint spacing in evals")
    summ.add_argument("--out", required=True, help="output summary CSV path")
    summ.set_defaults(func=_cmd_summarize)
    return parser


def _read_config_file(path: str) -> dict[str, str]:
    """Parse `key = value` lines; '#' starts a comment, blank lines ignored."""
    entries: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key = key.strip().replace("-", "_")
        if key not in _RUN_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        entries[key] = value.strip()
    return entries


def _merge_option(args, file_cfg: dict[str, str], key: str, convert):
    flag_value = getattr(args, key, None)
    if flag_value is not None:
        return flag_value
    if key in file_cfg:
        try:
            return convert(file_cfg[key])
        except ValueError as exc:
            raise UsageError(f"config key {key!r}: {exc}") from None
    return _RUN_DEFAULTS.get(key)


def _parse_seeds(text: str) -> tuple[int, ...]:
    try:
        seeds = tuple(int(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError:
        raise UsageError(f"seeds must be comma-separated integers, got {text!r}") from None
    if not seeds:
        raise UsageError("seeds list is empty")
    return seeds


def _parse_x0(text: str):
    if text in ("auto", "zeros", "standard-rosenbrock"):
        return text
    try:
        return tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise UsageError(
            f"x0 must be zeros, standard-rosenbrock, or comma-separated floats, got {text!r}"
        ) from None


def _cmd_run(args) -> int:
    file_cfg = _read_config_file(args.config) if args.config else {}

    def opt(key, convert):
        return _merge_option(args, file_cfg, key, convert)

    alg = opt("alg", str)
    obj = opt("obj", str)
    evals = opt("evals", int)
    out = opt("out", str)
    for name, value in (("--alg", alg), ("--obj", obj), ("--evals", evals), ("--out", out)):
        if value is None:
            raise UsageError(f"{name} is required (flag or config file)")
    if alg not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {alg!r}; expected one of {ALGORITHMS}")

    x0 = opt("x0", str)
    if isinstance(x0, str):
        x0 = _parse_x0(x0)
    seeds = opt("seeds", str)
    if isinstance(seeds, str):
        seeds = _parse_seeds(seeds)

    cfg = ExperimentConfig(
        alg=alg,
        obj=obj,
        max_evals=evals,
        seeds=seeds,
        x0=x0,
        m=opt("m", int),
        T=opt("T", int),
        eps=opt("eps", float),
        kappa=opt("kappa", float),
        hess_radius=opt("hess_radius", float),
        q=opt("q", int),
        jobs=opt("jobs", int),
    )
    paths = run_experiment(cfg, out)
    for path in paths:
        print(path)
    return 0


def _cmd_summarize(args) -> int:
    in_dir = Path(args.in_dir)
    trace_files = sorted(in_dir.glob("seed_*.csv"))
    if not trace_files:
        combined = in_dir / "combined.csv"
        if combined.exists():
            trace_files = [combined]
    if not trace_files:
        raise DatasetFormatError(f"no trace CSVs found in {in_dir}")
    rows_by_seed = {}
    for path in trace_files:
        for seed, rows in read_trace_csv(path).items():
            rows_by_seed.setdefault(seed, []).extend(rows)
    rows = summarize(rows_by_seed, args.grid)
    write_summary_csv(args.out, rows)
    print(args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DatasetFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_exit() -> None:
    """Console-script entry point."""
    raise SystemExit(main(sys.argv[1:]))
