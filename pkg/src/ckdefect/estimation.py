"""Polynomial defect-proneness model over (DIT, RFC, WMC).

Each metric maps to a percentage through its own polynomial; a class score
(C-DPR) is the weighted sum of the three, and a project score (P-DPR) applies
the same weights to the per-metric means over the project's classes.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Mapping, NamedTuple, Sequence

from .metrics import MetricVector


class Evaluation(NamedTuple):
    value: float
    clamped: bool


@dataclass(frozen=True)
class PolynomialModel:
    """Coefficients highest power first, valid on ``[domain_lo, domain_hi]``."""

    coefficients: tuple[float, ...]
    domain_lo: float
    domain_hi: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if not self.coefficients:
            raise ValueError("polynomial needs at least one coefficient")
        if not self.domain_lo < self.domain_hi:
            raise ValueError("domain_lo must be below domain_hi")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x: float) -> float:
        return eval_poly(self, x).value


def horner(coefficients: Sequence[float], x: float) -> float:
    acc = 0.0
    for c in coefficients:
        acc = acc * x + c
    return acc


def eval_poly(p: PolynomialModel, x: float) -> Evaluation:
    """Evaluate ``p`` at ``x`` clamped into its domain."""
    clamped = x < p.domain_lo or x > p.domain_hi
    x = min(max(x, p.domain_lo), p.domain_hi)
    return Evaluation(horner(p.coefficients, x), clamped)


DIT_DOMAIN = (1.0, 6.0)
RFC_DOMAIN = (0.0, 222.0)
WMC_DOMAIN = (0.0, 100.0)


@dataclass(frozen=True)
class ModelSet:
    label: str
    dit_poly: PolynomialModel
    rfc_poly: PolynomialModel
    wmc_poly: PolynomialModel
    w_dit: float
    w_rfc: float
    w_wmc: float

    def __post_init__(self) -> None:
        for attr, degree in (("dit_poly", 3), ("rfc_poly", 2), ("wmc_poly", 2)):
            if getattr(self, attr).degree != degree:
                raise ValueError(f"{attr} must have degree {degree}")
        for attr in ("w_dit", "w_rfc", "w_wmc"):
            if not getattr(self, attr) > 0:
                raise ValueError(f"{attr} must be positive")

    @property
    def weights(self) -> tuple[float, float, float]:
        return (self.w_dit, self.w_rfc, self.w_wmc)

    @classmethod
    def from_coefficients(
        cls, label: str, dit: Sequence[float], rfc: Sequence[float], wmc: Sequence[float],
        weights: Sequence[float], domains: Mapping[str, Sequence[float]] | None = None,
    ) -> ModelSet:
        domains = dict(domains or {})
        dlo, dhi = domains.get("dit", DIT_DOMAIN)
        rlo, rhi = domains.get("rfc", RFC_DOMAIN)
        wlo, whi = domains.get("wmc", WMC_DOMAIN)
        w_dit, w_rfc, w_wmc = weights
        return cls(
            label,
            PolynomialModel(tuple(dit), dlo, dhi),
            PolynomialModel(tuple(rfc), rlo, rhi),
            PolynomialModel(tuple(wmc), wlo, whi),
            w_dit, w_rfc, w_wmc,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "dit": list(self.dit_poly.coefficients),
            "rfc": list(self.rfc_poly.coefficients),
            "wmc": list(self.wmc_poly.coefficients),
            "weights": list(self.weights),
            "domains": {
                "dit": [self.dit_poly.domain_lo, self.dit_poly.domain_hi],
                "rfc": [self.rfc_poly.domain_lo, self.rfc_poly.domain_hi],
                "wmc": [self.wmc_poly.domain_lo, self.wmc_poly.domain_hi],
            },
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> ModelSet:
        allowed = {"label", "dit", "rfc", "wmc", "weights", "domains"}
        unknown = set(doc) - allowed
        if unknown:
            raise ValueError(f"unknown model-set key(s): {', '.join(sorted(unknown))}")
        for key, size in (("dit", 4), ("rfc", 3), ("wmc", 3), ("weights", 3)):
            vals = doc.get(key)
            if not isinstance(vals, list) or len(vals) != size or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals
            ):
                raise ValueError(f"model-set {key!r} must be a list of {size} numbers")
        domains = doc.get("domains") or {}
        if set(domains) - {"dit", "rfc", "wmc"}:
            raise ValueError("model-set domains may only name dit, rfc, wmc")
        return cls.from_coefficients(
            str(doc.get("label", "custom")), doc["dit"], doc["rfc"], doc["wmc"], doc["weights"], domains
        )


def load_model_set(path: str) -> ModelSet:
    with open(path, encoding="utf-8") as fh:
        return ModelSet.from_dict(json.load(fh))


def dump_model_set(m: ModelSet) -> str:
    return json.dumps(m.to_dict(), indent=2) + "\n"


PUBLISHED = ModelSet.from_coefficients(
    "PUBLISHED",
    dit=(-1.55, 16.86, -35.3, 30.67),
    rfc=(0.002, 0.06, 0.33),
    wmc=(0.0043, 0.4, 4.3),
    weights=(0.25, 0.37, 0.38),
)

# Refit against the golden class table (see calibration.recover_calibrated).
# DIT, WMC and weights snap to the printed precision; the RFC quadratic has no
# printed counterpart that matches, so it keeps the least-squares values.
CALIBRATED = ModelSet.from_coefficients(
    "CALIBRATED",
    dit=(-1.6, 16.86, -35.3, 30.67),
    rfc=(0.0021003516, 0.057980494, 0.32981028),
    wmc=(0.0043, 0.4, 4.3),
    weights=(0.25, 0.37, 0.42),
)

BUILTIN_MODELS = {"published": PUBLISHED, "calibrated": CALIBRATED}


# -- per-metric components ---------------------------------------------------

def _dit_eval(dit: int, m: ModelSet) -> Evaluation:
    if dit < 0:
        raise ValueError("DIT must be non-negative")
    if dit == 0:
        # a lone root class carries no inheritance-driven risk
        return Evaluation(0.0, False)
    return eval_poly(m.dit_poly, dit)


def _nonneg(value: int, metric: str) -> int:
    if value < 0:
        raise ValueError(f"{metric} must be non-negative")
    return value


def dp_dit(dit: int, m: ModelSet = CALIBRATED) -> float:
    return _dit_eval(dit, m).value


def dp_rfc(rfc: int, m: ModelSet = CALIBRATED) -> float:
    return eval_poly(m.rfc_poly, _nonneg(rfc, "RFC")).value


def dp_wmc(wmc: int, m: ModelSet = CALIBRATED) -> float:
    return eval_poly(m.wmc_poly, _nonneg(wmc, "WMC")).value


@dataclass(frozen=True)
class DefectProfile:
    class_name: str
    dp_dit: float
    dp_rfc: float
    dp_wmc: float
    c_dpr: float
    clamped: tuple[str, ...] = ()


def combine(weights: Sequence[float], dp_dit_: float, dp_rfc_: float, dp_wmc_: float) -> float:
    w_dit, w_rfc, w_wmc = weights
    return w_dit * dp_dit_ + w_rfc * dp_rfc_ + w_wmc * dp_wmc_


def class_dpi(v: MetricVector, m: ModelSet = CALIBRATED) -> DefectProfile:
    d = _dit_eval(v.dit, m)
    r = eval_poly(m.rfc_poly, _nonneg(v.rfc, "RFC"))
    w = eval_poly(m.wmc_poly, _nonneg(v.wmc, "WMC"))
    clamped = tuple(name for name, e in (("DIT", d), ("RFC", r), ("WMC", w)) if e.clamped)
    return DefectProfile(v.class_name, d.value, r.value, w.value, combine(m.weights, d.value, r.value, w.value), clamped)


@dataclass(frozen=True)
class ProjectProfile:
    project_id: str
    class_profiles: tuple[DefectProfile, ...]
    mean_dp_dit: float
    mean_dp_rfc: float
    mean_dp_wmc: float
    p_dpr: float

    @property
    def n(self) -> int:
        return len(self.class_profiles)


def project_dpi(vectors: Iterable[MetricVector], m: ModelSet = CALIBRATED, project_id: str = "project") -> ProjectProfile:
    profiles = tuple(class_dpi(v, m) for v in vectors)
    if not profiles:
        raise ValueError(f"project {project_id!r} has no classes")
    n = len(profiles)
    mean_dit = math.fsum(p.dp_dit for p in profiles) / n
    mean_rfc = math.fsum(p.dp_rfc for p in profiles) / n
    mean_wmc = math.fsum(p.dp_wmc for p in profiles) / n
    return ProjectProfile(project_id, profiles, mean_dit, mean_rfc, mean_wmc, combine(m.weights, mean_dit, mean_rfc, mean_wmc))


# -- influence bands ---------------------------------------------------------

class Metric(str, Enum):
    DIT = "DIT"
    RFC = "RFC"
    WMC = "WMC"


INFLUENCE_KNOTS: dict[Metric, tuple[tuple[float, float], ...]] = {
    Metric.DIT: ((1, 9), (2, 21), (3, 36), (4, 56), (5, 74), (6, 98)),
    Metric.RFC: (
        (1, 3), (23, 31), (45, 56), (60, 80), (80, 91), (100, 78),
        (120, 62), (149, 51), (170, 40), (198, 26), (222, 7),
    ),
    Metric.WMC: (
        (1, 5), (5, 25), (10, 42), (12, 63), (16, 80), (20, 92),
        (30, 75), (50, 54), (60, 40), (70, 10), (96, 2),
    ),
}

RFC_INFLUENCE_NOTE = (
    "RFC influence bands peak at 91% (RFC=80) and fall to 7% at RFC=222; "
    "the band table is applied verbatim and is not monotone in RFC"
)


def influence(metric: Metric | str, value: float) -> Evaluation:
    """Piecewise-linear influence percentage; clamps outside the knot range."""
    if value < 0:
        raise ValueError("metric value must be non-negative")
    knots = INFLUENCE_KNOTS[Metric(metric)]
    xs = [k[0] for k in knots]
    if value <= xs[0]:
        return Evaluation(float(knots[0][1]), value < xs[0])
    if value >= xs[-1]:
        return Evaluation(float(knots[-1][1]), value > xs[-1])
    i = bisect_right(xs, value) - 1
    (x0, y0), (x1, y1) = knots[i], knots[i + 1]
    if value == x0:
        return Evaluation(float(y0), False)
    return Evaluation(y0 + (y1 - y0) * (value - x0) / (x1 - x0), False)


# -- thresholds --------------------------------------------------------------

class FlagLevel(str, Enum):
    WARN = "WARN"
    SECONDARY_WARN = "SECONDARY_WARN"
    MAX_EXCEEDED = "MAX_EXCEEDED"


@dataclass(frozen=True)
class Threshold:
    warn: float
    maximum: float
    secondary: float | None = None

    def __post_init__(self) -> None:
        if not self.warn < self.maximum:
            raise ValueError("warn threshold must be below the maximum")


@dataclass(frozen=True)
class ThresholdSet:
    dit: Threshold = Threshold(3, 6)
    rfc: Threshold = Threshold(50, 222, secondary=100)
    wmc: Threshold = Threshold(20, 100)


NASA_ROSENBERG = ThresholdSet()


@dataclass(frozen=True, order=True)
class Flag:
    metric: str
    level: FlagLevel

    def __str__(self) -> str:
        return f"{self.metric} {self.level.value}"


def _level(value: float, t: Threshold) -> FlagLevel | None:
    if value > t.maximum:
        return FlagLevel.MAX_EXCEEDED
    if t.secondary is not None and value >= t.secondary:
        return FlagLevel.SECONDARY_WARN
    if value >= t.warn:
        return FlagLevel.WARN
    return None


def threshold_flags(v: MetricVector, t: ThresholdSet = NASA_ROSENBERG) -> list[Flag]:
    """At most one flag per metric: the most severe level reached."""
    flags = []
    for metric, value, th in (("DIT", v.dit, t.dit), ("RFC", v.rfc, t.rfc), ("WMC", v.wmc, t.wmc)):
        level = _level(value, th)
        if level is not None:
            flags.append(Flag(metric, level))
    return flags
