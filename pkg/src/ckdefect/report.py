"""Class- and project-level reports and their text/CSV/JSON renderings."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .estimation import (
    RFC_INFLUENCE_NOTE, DefectProfile, Flag, Metric, ModelSet, ProjectProfile,
    influence, project_dpi, threshold_flags,
)
from .metrics import MetricVector

CSV_HEADER = ("class", "dit", "rfc", "wmc", "dp_dit", "dp_rfc", "dp_wmc", "c_dpr")
FORMATS = ("text", "csv", "structured")


@dataclass(frozen=True)
class ReportRow:
    vector: MetricVector
    profile: DefectProfile
    flags: tuple[Flag, ...]
    influence: Mapping[str, float]
    influence_clamped: tuple[str, ...] = ()


@dataclass(frozen=True)
class ProjectSection:
    summary: ProjectProfile
    rows: tuple[ReportRow, ...]


@dataclass(frozen=True)
class Report:
    model_label: str
    projects: tuple[ProjectSection, ...]
    notes: tuple[str, ...] = ()

    def max_p_dpr(self) -> float:
        return max(p.summary.p_dpr for p in self.projects)


def build_report(projects: Mapping[str, Sequence[MetricVector]], model: ModelSet) -> Report:
    if not projects or not any(projects.values()):
        raise ValueError("no classes found")
    notes: list[str] = [RFC_INFLUENCE_NOTE]
    sections = []
    for pid, vectors in projects.items():
        ordered = list(vectors)
        summary = project_dpi(ordered, model, pid)
        rows = []
        for v, prof in zip(ordered, summary.class_profiles):
            infl, infl_clamped = {}, []
            for metric, value in ((Metric.DIT, v.dit), (Metric.RFC, v.rfc), (Metric.WMC, v.wmc)):
                ev = influence(metric, value)
                infl[metric.value] = ev.value
                if ev.clamped:
                    infl_clamped.append(metric.value)
            for metric in prof.clamped:
                value = getattr(v, metric.lower())
                poly = getattr(model, f"{metric.lower()}_poly")
                notes.append(
                    f"{pid}/{v.class_name}: {metric}={value} outside model domain "
                    f"[{poly.domain_lo:g}, {poly.domain_hi:g}], evaluated at the nearest bound"
                )
            rows.append(ReportRow(v, prof, tuple(threshold_flags(v)), infl, tuple(infl_clamped)))
        sections.append(ProjectSection(summary, tuple(rows)))
    return Report(model.label, tuple(sections), tuple(notes))


def _fmt(x: float, decimals: int) -> str:
    s = f"{x:.{decimals}f}"
    return s[1:] if s.startswith("-") and float(s) == 0 else s


def _round(x: float, decimals: int) -> float:
    r = round(x, decimals)
    return 0.0 if r == 0 else r


def render_csv(report: Report, decimals: int = 2) -> str:
    multi = len(report.projects) > 1
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow((("project",) if multi else ()) + CSV_HEADER)
    for sec in report.projects:
        lead = (sec.summary.project_id,) if multi else ()
        for row in sec.rows:
            v, p = row.vector, row.profile
            w.writerow(lead + (v.class_name, v.dit, v.rfc, v.wmc) + tuple(
                _fmt(x, decimals) for x in (p.dp_dit, p.dp_rfc, p.dp_wmc, p.c_dpr)
            ))
        s = sec.summary
        w.writerow(lead + ("PROJECT", "", "", "") + tuple(
            _fmt(x, decimals) for x in (s.mean_dp_dit, s.mean_dp_rfc, s.mean_dp_wmc, s.p_dpr)
        ))
    return buf.getvalue()


def render_structured(report: Report, decimals: int = 2) -> str:
    def r(x: float) -> float:
        return _round(x, decimals)

    doc: dict[str, Any] = {"model": report.model_label, "projects": []}
    for sec in report.projects:
        s = sec.summary
        doc["projects"].append({
            "project": s.project_id,
            "n": s.n,
            "classes": [
                {
                    "class": row.vector.class_name,
                    "dit": row.vector.dit,
                    "rfc": row.vector.rfc,
                    "wmc": row.vector.wmc,
                    "dp_dit": r(row.profile.dp_dit),
                    "dp_rfc": r(row.profile.dp_rfc),
                    "dp_wmc": r(row.profile.dp_wmc),
                    "c_dpr": r(row.profile.c_dpr),
                    "flags": [str(f) for f in row.flags],
                    "influence": {k: r(val) for k, val in row.influence.items()},
                }
                for row in sec.rows
            ],
            "summary": {
                "mean_dp_dit": r(s.mean_dp_dit),
                "mean_dp_rfc": r(s.mean_dp_rfc),
                "mean_dp_wmc": r(s.mean_dp_wmc),
                "p_dpr": r(s.p_dpr),
            },
        })
    return json.dumps(doc, indent=2) + "\n"


def render_text(report: Report, decimals: int = 2) -> str:
    width = max([12] + [len(row.vector.class_name) for sec in report.projects for row in sec.rows])
    pw = max([7] + [len(sec.summary.project_id) for sec in report.projects])
    num = max(7, decimals + 5)
    head = (
        f"{'PROJECT':<{pw}}  {'class':<{width}}  {'DIT':>4} {'RFC':>4} {'WMC':>4}  "
        f"{'DPDIT':>{num}} {'DPRFC':>{num}} {'DPWMC':>{num}} {'C-DPR':>{num}}  FLAGS"
    )
    lines = [f"model: {report.model_label}", head, "-" * len(head)]
    for sec in report.projects:
        pid = sec.summary.project_id
        for row in sec.rows:
            v, p = row.vector, row.profile
            vals = " ".join(f"{_fmt(x, decimals):>{num}}" for x in (p.dp_dit, p.dp_rfc, p.dp_wmc, p.c_dpr))
            flags = ", ".join(str(f) for f in row.flags)
            lines.append(
                f"{pid:<{pw}}  {v.class_name:<{width}}  {v.dit:>4} {v.rfc:>4} {v.wmc:>4}  {vals}  {flags}".rstrip()
            )
        s = sec.summary
        vals = " ".join(f"{_fmt(x, decimals):>{num}}" for x in (s.mean_dp_dit, s.mean_dp_rfc, s.mean_dp_wmc, s.p_dpr))
        lines.append(f"{pid:<{pw}}  {'P-DPR':<{width}}  {'':>4} {'':>4} {'':>4}  {vals}")
    return "\n".join(lines) + "\n"


def render(report: Report, fmt: str = "text", decimals: int = 2) -> str:
    if fmt == "text":
        return render_text(report, decimals)
    if fmt == "csv":
        return render_csv(report, decimals)
    if fmt == "structured":
        return render_structured(report, decimals)
    raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
