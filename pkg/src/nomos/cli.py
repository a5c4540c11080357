"""Command-line front end.

    nomos check SPEC [--data INPUT=CSV ...]
    nomos run SPEC --model NAME=PATH [--data INPUT=CSV ...] [options]
    nomos report SUMMARY.json [SUMMARY.json ...]

Exit codes: 0 clean, 1 spec errors, 2 operational failure, 3 bugs found.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import engine
from .backends import ToyEnvBackend, open_backend
from .data import load_dataset
from .errors import ConfigError, NomosError, ParseError, SemaError
from .parser import parse
from .sema import check
from .stdlib import StdlibConfig, default_registry

EXIT_OK = 0
EXIT_SPEC_ERROR = 1
EXIT_OPERATIONAL = 2
EXIT_BUGS = 3


@dataclass
class RunConfig:
    spec_path: str
    models: dict[str, str] = field(default_factory=dict)   # import name -> path or exec:CMD
    data: dict[str, str] = field(default_factory=dict)     # input name -> CSV path
    budget: int = 5000
    seed: int = 0
    runs: int = 1
    jobs: int = 1
    max_retries: int = engine.DEFAULT_MAX_RETRIES
    wnoise_eps: float = 0.05
    blur_kernel: int = 3
    label_col: str | None = None
    out: str = "nomos_out"

    def validate(self) -> None:
        if self.budget < 1:
            raise ConfigError(f"budget must be >= 1, got {self.budget}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")


def _parse_bindings(pairs: list[str], flag: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for pair in pairs or []:
        name, sep, value = pair.partition("=")
        if not sep or not name or not value:
            raise ConfigError(f"{flag} expects NAME=VALUE, got {pair!r}")
        out[name] = value
    return out


def _load_sources(config: RunConfig) -> dict:
    return {name: load_dataset(path, label_col=config.label_col, name=name)
            for name, path in config.data.items()}


def _check_spec(spec_path: str, sources: dict):
    source_text = Path(spec_path).read_text(encoding="utf-8")
    spec = parse(source_text)
    schemas = {name: src.shape for name, src in sources.items()}
    return check(spec, default_registry(), schemas=schemas, filename=spec_path)


def _stdlib_config(config: RunConfig, backends: dict) -> StdlibConfig:
    h_max = 8
    for backend in backends.values():
        if isinstance(backend, ToyEnvBackend):
            h_max = backend.env.h_max
    return StdlibConfig(wnoise_eps=config.wnoise_eps, blur_kernel=config.blur_kernel,
                        h_max=h_max)


# ── check ────────────────────────────────────────────────────────


def cmd_check(args: argparse.Namespace) -> int:
    try:
        data = _parse_bindings(args.data, "--data")
        sources = {name: load_dataset(path, label_col=args.label_col, name=name)
                   for name, path in data.items()}
    except (NomosError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OPERATIONAL
    try:
        source_text = Path(args.spec).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OPERATIONAL
    try:
        spec = parse(source_text)
        schemas = {name: src.shape for name, src in sources.items()}
        typed = check(spec, default_registry(), schemas=schemas, filename=args.spec)
    except ParseError as exc:
        print(f"{args.spec}:{exc.span.line}:{exc.span.column}: error: {exc}", file=sys.stderr)
        return EXIT_SPEC_ERROR
    except SemaError as exc:
        for diag in exc.diagnostics:
            print(diag.render(), file=sys.stderr)
        return EXIT_SPEC_ERROR
    for diag in typed.warnings:
        print(diag.render(), file=sys.stderr)
    print(f"OK, k_static={typed.k_static}")
    return EXIT_OK


# ── run ──────────────────────────────────────────────────────────


def _execute_run(config: RunConfig, seed: int) -> engine.RunReport:
    """Load everything fresh and execute one seeded run."""
    sources = _load_sources(config)
    typed = _check_spec(config.spec_path, sources)
    backends = {name: open_backend(binding) for name, binding in config.models.items()}
    try:
        return engine.run(
            typed, sources, backends,
            budget=config.budget, seed=seed, max_retries=config.max_retries,
            config=_stdlib_config(config, backends),
        )
    finally:
        for backend in backends.values():
            backend.close()


def _run_worker(payload: tuple) -> engine.RunReport:
    config_dict, seed = payload
    return _execute_run(RunConfig(**config_dict), seed)


def cmd_run(args: argparse.Namespace) -> int:
    try:
        config = RunConfig(
            spec_path=args.spec,
            models=_parse_bindings(args.model, "--model"),
            data=_parse_bindings(args.data, "--data"),
            budget=args.budget,
            seed=args.seed,
            runs=args.runs,
            jobs=args.jobs,
            max_retries=args.max_retries,
            wnoise_eps=args.wnoise_eps,
            blur_kernel=args.blur_kernel,
            label_col=args.label_col,
            out=args.out,
        )
        config.validate()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OPERATIONAL

    seeds = [config.seed + i for i in range(config.runs)]
    try:
        if config.jobs > 1 and config.runs > 1:
            payloads = [(config.__dict__, seed) for seed in seeds]
            with ProcessPoolExecutor(max_workers=config.jobs) as pool:
                reports = list(pool.map(_run_worker, payloads))
        else:
            reports = [_execute_run(config, seed) for seed in seeds]
    except ParseError as exc:
        print(f"{config.spec_path}:{exc.span.line}:{exc.span.column}: error: {exc}",
              file=sys.stderr)
        return EXIT_SPEC_ERROR
    except SemaError as exc:
        for diag in exc.diagnostics:
            print(diag.render(), file=sys.stderr)
        return EXIT_SPEC_ERROR
    except (NomosError, TimeoutError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OPERATIONAL

    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports.sort(key=lambda r: r.seed)
    with (out_dir / "bugs.jsonl").open("w", encoding="utf-8") as handle:
        for report in reports:
            for bug in report.bugs:
                handle.write(json.dumps(bug.to_json_dict(), sort_keys=True) + "\n")
    summary = {
        "spec": Path(config.spec_path).stem,
        "runs": [report.to_json_dict() for report in reports],
    }
    (out_dir / "summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="utf-8")

    for report in reports:
        print(f"seed={report.seed} budget={report.budget} passed={report.passed} "
              f"precond_violations={report.precond_violations} "
              f"postcond_violations={report.postcond_violations} "
              f"unique_bugs={report.unique_bugs}")
    total_bugs = sum(report.unique_bugs for report in reports)
    return EXIT_BUGS if total_bugs > 0 else EXIT_OK


# ── report ───────────────────────────────────────────────────────


def cmd_report(args: argparse.Namespace) -> int:
    per_spec: dict[str, list[int]] = {}
    for path in args.summaries:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            name = data["spec"]
            counts = [run["unique_bugs"] for run in data["runs"]]
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            print(f"error: {path}: {exc!r}", file=sys.stderr)
            return EXIT_OPERATIONAL
        per_spec.setdefault(name, []).extend(counts)

    print(f"{'spec':<32} {'runs':>5} {'mean_unique_bugs':>17}  violated_runs")
    for name in sorted(per_spec):
        counts = per_spec[name]
        mean = sum(counts) / len(counts)
        violated = sum(1 for c in counts if c > 0)
        tail = str(violated) if violated else "not violated"
        print(f"{name:<32} {len(counts):>5} {mean:>17.1f}  {tail}")
    return EXIT_OK


# ── entry point ──────────────────────────────────────────────────


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nomos",
                                     description="Check and test k-safety model specs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="parse and check a spec")
    p_check.add_argument("spec")
    p_check.add_argument("--data", action="append", metavar="INPUT=CSV",
                         help="bind an input to a CSV source (informs feature kinds)")
    p_check.add_argument("--label-col", default=None)
    p_check.set_defaults(func=cmd_check)

    p_run = sub.add_parser("run", help="run the testing harness")
    p_run.add_argument("spec")
    p_run.add_argument("--model", action="append", metavar="NAME=PATH|NAME=exec:CMD")
    p_run.add_argument("--data", action="append", metavar="INPUT=CSV")
    p_run.add_argument("--budget", type=int, default=5000)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--runs", type=int, default=1)
    p_run.add_argument("--jobs", type=int, default=1)
    p_run.add_argument("--max-retries", type=int, default=engine.DEFAULT_MAX_RETRIES)
    p_run.add_argument("--wnoise-eps", type=float, default=0.05)
    p_run.add_argument("--blur-kernel", type=int, default=3)
    p_run.add_argument("--label-col", default=None)
    p_run.add_argument("--out", default="nomos_out")
    p_run.set_defaults(func=cmd_run)

    p_report = sub.add_parser("report", help="aggregate run summaries")
    p_report.add_argument("summaries", nargs="+")
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
