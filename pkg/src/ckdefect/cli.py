"""Command-line entry point.

Usage:
    ckdefect analyze PATH... [--model calibrated] [--output text] [--gate 20]
    ckdefect metrics PATH...
    ckdefect calibrate [GOLDEN_CSV] [--model-out model.json]

Exit codes:
- 0: success
- 1: a project's P-DPR exceeds --gate
- 2: input or usage error

Reports go to stdout; warnings and data notes go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, TextIO

from . import __version__
from .calibration import SingularSystemError, load_golden, recover_calibrated
from .estimation import BUILTIN_MODELS, ModelSet, dump_model_set, load_model_set
from .frontend import DEFAULT_SUFFIXES, LexError, ParseError, load_sources
from .metrics import MetricVector, WmcMode, compute_all, read_metrics_csv, write_metrics_csv
from .model import ModelError, load_model_document
from .report import FORMATS, Report, build_report, render

INPUT_FORMATS = ("source", "model-document", "metrics-csv")

EXIT_OK = 0
EXIT_GATE = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


@dataclass
class AnalysisConfig:
    input_paths: list[str]
    input_format: str | None = None  # None: infer from file suffixes
    model_choice: str = "calibrated"
    model_file: str | None = None
    wmc_mode: WmcMode = WmcMode.COUNT
    output_format: str = "text"
    gate: float | None = None
    round_decimals: int = 2
    suffixes: tuple[str, ...] = DEFAULT_SUFFIXES
    project_id: str | None = None
    notes: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.gate is not None and not 0 < self.gate <= 100:
            raise InputError("--gate must be in (0, 100]")
        if self.round_decimals < 0:
            raise InputError("--round must be non-negative")

    def model_set(self) -> ModelSet:
        if self.model_file:
            return load_model_set(self.model_file)
        return BUILTIN_MODELS[self.model_choice]


def infer_format(paths: Sequence[str]) -> str:
    suffixes = {Path(p).suffix.lower() for p in paths if Path(p).is_file()}
    if suffixes == {".csv"}:
        return "metrics-csv"
    if suffixes == {".json"}:
        return "model-document"
    return "source"


def _default_project(paths: Sequence[str]) -> str:
    if len(paths) == 1:
        return Path(paths[0]).resolve().stem or "project"
    return "project"


def collect_vectors(config: AnalysisConfig) -> dict[str, list[MetricVector]]:
    """Run the front half of the pipeline: input to per-project metric vectors."""
    if not config.input_paths:
        raise InputError("no input paths given")
    fmt = config.input_format or infer_format(config.input_paths)
    pid = config.project_id or _default_project(config.input_paths)
    if fmt == "metrics-csv":
        projects: dict[str, list[MetricVector]] = {}
        for path in sorted(config.input_paths):
            text = Path(path).read_text(encoding="utf-8")
            for name, vecs in read_metrics_csv(text, config.project_id or Path(path).stem).items():
                projects.setdefault(name, []).extend(vecs)
    else:
        if fmt == "model-document":
            if len(config.input_paths) != 1:
                raise InputError("model-document input takes exactly one file")
            model = load_model_document(config.input_paths[0])
        elif fmt == "source":
            model = load_sources(config.input_paths, config.suffixes)
        else:
            raise InputError(f"unknown input format {fmt!r}")
        projects = {pid: compute_all(model, config.wmc_mode)}
    if not any(projects.values()):
        raise InputError("no classes found")
    return projects


def run_analyze(config: AnalysisConfig) -> tuple[Report, int]:
    report = build_report(collect_vectors(config), config.model_set())
    status = EXIT_OK
    if config.gate is not None and report.max_p_dpr() > config.gate:
        status = EXIT_GATE
    return report, status


def run_metrics(config: AnalysisConfig) -> str:
    projects = collect_vectors(config)
    return write_metrics_csv(v for vecs in projects.values() for v in vecs)


# -- argument handling ---------------------------------------------------------

def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("paths", nargs="+", help="source files/directories, a model document, or metrics CSV files")
    p.add_argument("--input-format", choices=INPUT_FORMATS, default=None,
                   help="input kind (default: inferred from file suffixes)")
    p.add_argument("--wmc-mode", choices=[m.value for m in WmcMode], default="count")
    p.add_argument("--suffix", action="append", dest="suffixes", default=None,
                   help="source file suffix to scan for (repeatable; default .java)")
    p.add_argument("--project", dest="project_id", default=None, help="project id for the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ckdefect", description="CK-metric defect-proneness estimation")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="metrics + defect-proneness report")
    _add_input_args(analyze)
    analyze.add_argument("--model", choices=sorted(BUILTIN_MODELS), default="calibrated")
    analyze.add_argument("--model-file", default=None, help="JSON model-set document (overrides --model)")
    analyze.add_argument("--output", choices=FORMATS, default="text")
    analyze.add_argument("--gate", type=float, default=None, help="fail (exit 1) if any P-DPR exceeds this percent")
    analyze.add_argument("--round", type=int, default=2, dest="round_decimals")
    analyze.set_defaults(func=_cmd_analyze)

    metrics = sub.add_parser("metrics", help="emit class,dit,rfc,wmc CSV")
    _add_input_args(metrics)
    metrics.set_defaults(func=_cmd_metrics)

    cal = sub.add_parser("calibrate", help="refit model coefficients to a golden table")
    cal.add_argument("golden", nargs="?", default=None, help="golden CSV (default: embedded class table)")
    cal.add_argument("--model-out", default=None, help="write the recovered model set here")
    cal.add_argument("--output", choices=("text", "structured"), default="text")
    cal.add_argument("--round", type=int, default=2, dest="round_decimals")
    cal.set_defaults(func=_cmd_calibrate)
    return parser


def _config(args: argparse.Namespace) -> AnalysisConfig:
    return AnalysisConfig(
        input_paths=list(args.paths),
        input_format=args.input_format,
        model_choice=getattr(args, "model", "calibrated"),
        model_file=getattr(args, "model_file", None),
        wmc_mode=WmcMode(args.wmc_mode),
        output_format=getattr(args, "output", "text"),
        gate=getattr(args, "gate", None),
        round_decimals=getattr(args, "round_decimals", 2),
        suffixes=tuple(args.suffixes) if args.suffixes else DEFAULT_SUFFIXES,
        project_id=args.project_id,
    )


def _cmd_analyze(args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    config = _config(args)
    report, status = run_analyze(config)
    out.write(render(report, config.output_format, config.round_decimals))
    for note in report.notes:
        print(f"note: {note}", file=err)
    if status == EXIT_GATE:
        print(f"gate failed: P-DPR {report.max_p_dpr():.2f} > {config.gate:g}", file=err)
    return status


def _cmd_metrics(args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    out.write(run_metrics(_config(args)))
    return EXIT_OK


def _cmd_calibrate(args: argparse.Namespace, out: TextIO, err: TextIO) -> int:
    golden = load_golden(args.golden)
    model, divergence = recover_calibrated(golden)
    if divergence.excluded_cells:
        print(f"note: {divergence.excluded_cells} untrusted WMC cell(s) excluded from the WMC fit", file=err)
    if args.model_out:
        Path(args.model_out).write_text(dump_model_set(model), encoding="utf-8")
    if args.output == "structured":
        out.write(json.dumps({"model_set": model.to_dict(), "divergence": divergence.to_dict()}, indent=2) + "\n")
    else:
        out.write(f"recovered model set ({model.label}):\n")
        for name, coeffs in (("dit", model.dit_poly.coefficients), ("rfc", model.rfc_poly.coefficients),
                             ("wmc", model.wmc_poly.coefficients), ("weights", model.weights)):
            out.write(f"  {name:<8} " + ", ".join(f"{c:.6g}" for c in coeffs) + "\n")
        out.write("\n" + divergence.render_text(args.round_decimals))
    return EXIT_OK


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return int(args.func(args, out, err))
    except (InputError, ModelError, ParseError, LexError, SingularSystemError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except Exception as exc:  # exit-status contract is total
        print(f"internal error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
