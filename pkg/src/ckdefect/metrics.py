"""WMC, DIT and RFC over a :class:`ClassModel`."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .model import SELF, ClassDecl, ClassModel


class WmcMode(str, Enum):
    COUNT = "count"
    CYCLOMATIC = "cyclomatic"


@dataclass(frozen=True)
class MetricVector:
    class_name: str
    dit: int
    rfc: int
    wmc: int

    def __post_init__(self) -> None:
        for name in ("dit", "rfc", "wmc"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative for {self.class_name!r}")


def compute_wmc(cls: ClassDecl, mode: WmcMode | str = WmcMode.COUNT) -> int:
    """Method count, or the sum of per-method cyclomatic complexity."""
    mode = WmcMode(mode)
    if mode is WmcMode.COUNT:
        return len(cls.methods)
    return sum(m.decision_points + 1 for m in cls.methods)


def compute_dit(cls: ClassDecl, model: ClassModel) -> int:
    """Number of extends-edges from ``cls`` up to its root.

    An external superclass counts as one edge and ends the walk.
    """
    depth = 0
    sup = cls.superclass
    while sup is not None:
        depth += 1
        parent = model.classes.get(sup)
        if parent is None:
            break
        sup = parent.superclass
        if depth > len(model.classes):
            raise ValueError(f"inheritance cycle through {cls.name!r}")
    return depth


def response_set(cls: ClassDecl) -> set[tuple[str, str, int]]:
    rs = {(cls.name, m.name, m.arity) for m in cls.methods}
    for m in cls.methods:
        for ref in m.invocations:
            if ref.receiver_key != SELF:
                rs.add((ref.receiver_key, ref.method_name, ref.arity))
    return rs


def compute_rfc(cls: ClassDecl, model: ClassModel | None = None) -> int:
    """Size of the one-level response set: own methods plus distinct remote calls."""
    return len(response_set(cls))


def compute_all(model: ClassModel, mode: WmcMode | str = WmcMode.COUNT) -> list[MetricVector]:
    return [
        MetricVector(name, compute_dit(cls, model), compute_rfc(cls, model), compute_wmc(cls, mode))
        for name, cls in sorted(model.classes.items())
    ]


METRICS_HEADER = ("class", "dit", "rfc", "wmc")


def write_metrics_csv(vectors: Iterable[MetricVector]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(METRICS_HEADER)
    for v in vectors:
        writer.writerow((v.class_name, v.dit, v.rfc, v.wmc))
    return buf.getvalue()


def read_metrics_csv(text: str, default_project: str = "project") -> dict[str, list[MetricVector]]:
    """Parse ``class,dit,rfc,wmc`` rows, optionally with a ``project`` column.

    Extra columns are ignored so golden tables can be replayed directly.
    Returns vectors grouped by project in first-seen order.
    """
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ValueError("metrics CSV is empty")
    header = [h.strip() for h in reader.fieldnames]
    missing = [c for c in METRICS_HEADER if c not in header]
    if missing:
        raise ValueError(f"metrics CSV lacks column(s): {', '.join(missing)}")
    reader.fieldnames = header
    projects: dict[str, list[MetricVector]] = {}
    for lineno, row in enumerate(reader, start=2):
        try:
            vec = MetricVector(
                row["class"].strip(),
                int(row["dit"]), int(row["rfc"]), int(row["wmc"]),
            )
        except (TypeError, ValueError) as exc:
            raise ValueError(f"metrics CSV line {lineno}: {exc}") from exc
        if not vec.class_name:
            raise ValueError(f"metrics CSV line {lineno}: empty class name")
        project = (row.get("project") or default_project).strip()
        projects.setdefault(project, []).append(vec)
    return projects
