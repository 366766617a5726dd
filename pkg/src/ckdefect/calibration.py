"""Coefficient recovery from the golden class table.

Polynomials are fit through the normal equations on a centred and scaled
abscissa; the combination weights through the normal equations of the
three-column design.  Systems are at most 4x4, solved by Gaussian
elimination with partial pivoting.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from typing import Any, Iterable, Sequence

from .estimation import (
    INFLUENCE_KNOTS, PUBLISHED, ModelSet, combine, dp_dit, dp_rfc, dp_wmc, horner,
)

GOLDEN_HEADER = ("project", "class", "dit", "rfc", "wmc", "dp_dit", "dp_rfc", "dp_wmc", "c_dpr", "trust_wmc")
_PIVOT_TOL = 1e-12


class SingularSystemError(ArithmeticError):
    pass


def solve_linear(a: Sequence[Sequence[float]], b: Sequence[float]) -> list[float]:
    """Solve ``a @ x = b`` for square ``a``."""
    n = len(a)
    m = [list(map(float, row)) + [float(rhs)] for row, rhs in zip(a, b)]
    scale = max((abs(v) for row in m for v in row[:n]), default=0.0)
    if scale == 0.0:
        raise SingularSystemError("coefficient matrix is zero")
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(m[r][col]))
        if abs(m[piv][col]) <= _PIVOT_TOL * scale:
            raise SingularSystemError(f"matrix is singular (column {col})")
        m[col], m[piv] = m[piv], m[col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            if f:
                for c in range(col, n + 1):
                    m[r][c] -= f * m[col][c]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        x[r] = (m[r][n] - math.fsum(m[r][c] * x[c] for c in range(r + 1, n))) / m[r][r]
    return x


@dataclass(frozen=True)
class FitReport:
    coefficients: tuple[float, ...]
    residuals: tuple[float, ...]
    max_abs_residual: float
    method: str  # "exact_solve" | "least_squares"


def _expand_shifted(coeffs_u: Sequence[float], shift: float, scale: float) -> list[float]:
    """Rewrite sum a_k u^k with u = (x - shift) / scale into powers of x.

    Input and output are lowest power first.
    """
    out = [0.0] * len(coeffs_u)
    for k, a in enumerate(coeffs_u):
        c = a / scale**k
        for j in range(k + 1):
            out[j] += c * math.comb(k, j) * (-shift) ** (k - j)
    return out


def fit_polynomial(points: Iterable[tuple[float, float]], degree: int) -> FitReport:
    """Least-squares polynomial of ``degree`` through ``points``.

    With exactly ``degree + 1`` points the Vandermonde system is solved
    directly.  Coefficients come back highest power first.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if degree < 0:
        raise ValueError("degree must be non-negative")
    k = degree + 1
    if len(pts) < k:
        raise ValueError(f"need at least {k} points for degree {degree}, got {len(pts)}")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    shift = math.fsum(xs) / len(xs)
    spread = max(abs(x - shift) for x in xs)
    scale = spread if spread > 0 else 1.0
    us = [(x - shift) / scale for x in xs]

    if len(pts) == k:
        method = "exact_solve"
        a = [[u**j for j in range(k)] for u in us]
        coeffs_u = solve_linear(a, ys)
    else:
        method = "least_squares"
        moments = [math.fsum(u**p for u in us) for p in range(2 * k - 1)]
        a = [[moments[i + j] for j in range(k)] for i in range(k)]
        rhs = [math.fsum(y * u**i for u, y in zip(us, ys)) for i in range(k)]
        coeffs_u = solve_linear(a, rhs)

    coeffs = tuple(reversed(_expand_shifted(coeffs_u, shift, scale)))
    # residuals from the well-conditioned centred form
    residuals = tuple(horner(coeffs_u[::-1], u) - y for u, y in zip(us, ys))
    return FitReport(coeffs, residuals, max(abs(r) for r in residuals), method)


def fit_weights(rows: Iterable[Sequence[float]]) -> FitReport:
    """Least-squares weights mapping (dp_dit, dp_rfc, dp_wmc) to c_dpr, no intercept."""
    data = [tuple(map(float, r)) for r in rows]
    if len(data) < 3:
        raise ValueError(f"need at least 3 rows, got {len(data)}")
    if any(len(r) != 4 for r in data):
        raise ValueError("rows must be (dp_dit, dp_rfc, dp_wmc, c_dpr)")
    cols = [[r[j] for r in data] for j in range(3)]
    norms = [math.sqrt(math.fsum(v * v for v in c)) for c in cols]
    for name, nrm in zip(("dp_dit", "dp_rfc", "dp_wmc"), norms):
        if nrm == 0.0:
            raise SingularSystemError(f"column {name} is identically zero")
    scaled = [[r[j] / norms[j] for j in range(3)] for r in data]
    ys = [r[3] for r in data]
    if len(data) == 3:
        method = "exact_solve"
        z = solve_linear(scaled, ys)
    else:
        method = "least_squares"
        ata = [[math.fsum(s[i] * s[j] for s in scaled) for j in range(3)] for i in range(3)]
        aty = [math.fsum(s[i] * y for s, y in zip(scaled, ys)) for i in range(3)]
        try:
            z = solve_linear(ata, aty)
        except SingularSystemError:
            raise SingularSystemError("weight design matrix is rank-deficient") from None
    w = tuple(zj / nj for zj, nj in zip(z, norms))
    residuals = tuple(combine(w, *r[:3]) - r[3] for r in data)
    return FitReport(w, residuals, max(abs(r) for r in residuals), method)


# -- golden data ----------------------------------------------------------------

@dataclass(frozen=True)
class GoldenRow:
    project: str
    class_index: int
    dit: int
    rfc: int
    wmc: int
    dp_dit: float
    dp_rfc: float
    dp_wmc: float
    c_dpr: float
    wmc_trusted: bool = True


@dataclass(frozen=True)
class GoldenProject:
    project: str
    mean_dp_dit: float
    mean_dp_rfc: float
    mean_dp_wmc: float
    p_dpr: float


@dataclass(frozen=True)
class GoldenDataset:
    class_rows: tuple[GoldenRow, ...]
    project_rows: tuple[GoldenProject, ...] = ()
    influence_knots: Any = None

    def rows_for(self, project: str) -> list[GoldenRow]:
        return [r for r in self.class_rows if r.project == project]

    @property
    def projects(self) -> list[str]:
        return list(dict.fromkeys(r.project for r in self.class_rows))


def parse_golden_csv(text: str) -> tuple[GoldenRow, ...]:
    reader = csv.DictReader(io.StringIO(text))
    header = tuple(h.strip() for h in (reader.fieldnames or ()))
    if header != GOLDEN_HEADER:
        raise ValueError(f"golden CSV header must be {','.join(GOLDEN_HEADER)}")
    reader.fieldnames = list(header)
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        try:
            trust = rec["trust_wmc"].strip().lower()
            if trust not in ("trusted", "corrupted"):
                raise ValueError(f"trust_wmc must be 'trusted' or 'corrupted', got {trust!r}")
            rows.append(GoldenRow(
                rec["project"].strip(), int(rec["class"]),
                int(rec["dit"]), int(rec["rfc"]), int(rec["wmc"]),
                float(rec["dp_dit"]), float(rec["dp_rfc"]), float(rec["dp_wmc"]), float(rec["c_dpr"]),
                trust == "trusted",
            ))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"golden CSV line {lineno}: {exc}") from exc
    if not rows:
        raise ValueError("golden CSV has no rows")
    return tuple(rows)


def _data_text(name: str) -> str:
    return resources.files("ckdefect").joinpath("data", name).read_text(encoding="utf-8")


def load_golden(path: str | None = None) -> GoldenDataset:
    """Load a golden CSV, or the embedded class table when ``path`` is None."""
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            return GoldenDataset(parse_golden_csv(fh.read()), (), INFLUENCE_KNOTS)
    rows = parse_golden_csv(_data_text("golden_classes.csv"))
    projects = tuple(
        GoldenProject(r["project"], float(r["mean_dp_dit"]), float(r["mean_dp_rfc"]),
                      float(r["mean_dp_wmc"]), float(r["p_dpr"]))
        for r in csv.DictReader(io.StringIO(_data_text("golden_projects.csv")))
    )
    return GoldenDataset(rows, projects, INFLUENCE_KNOTS)


def write_golden_csv(golden: GoldenDataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GOLDEN_HEADER)
    for r in golden.class_rows:
        w.writerow((r.project, r.class_index, r.dit, r.rfc, r.wmc,
                    f"{r.dp_dit:.2f}", f"{r.dp_rfc:.2f}", f"{r.dp_wmc:.2f}", f"{r.c_dpr:.2f}",
                    "trusted" if r.wmc_trusted else "corrupted"))
    return buf.getvalue()


# -- recovery and divergence ------------------------------------------------------

@dataclass(frozen=True)
class Gap:
    at: float
    reference: float  # value being compared against (calibrated or golden)
    published: float

    @property
    def size(self) -> float:
        return abs(self.published - self.reference)


@dataclass(frozen=True)
class ComponentDivergence:
    component: str
    vs_calibrated: Gap
    vs_golden: Gap


@dataclass(frozen=True)
class DivergenceReport:
    components: tuple[ComponentDivergence, ...]
    weight_gaps: tuple[tuple[str, float, float], ...]  # (name, published, calibrated)
    excluded_cells: int

    def component(self, name: str) -> ComponentDivergence:
        for c in self.components:
            if c.component == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        def gap(g: Gap, ref: str) -> dict[str, float]:
            return {"at": g.at, "published": g.published, ref: g.reference, "gap": g.size}

        return {
            "components": {
                c.component: {
                    "published_vs_calibrated": gap(c.vs_calibrated, "calibrated"),
                    "published_vs_golden": gap(c.vs_golden, "golden"),
                }
                for c in self.components
            },
            "weights": {name: {"published": p, "calibrated": c, "gap": abs(p - c)} for name, p, c in self.weight_gaps},
            "excluded_cells": self.excluded_cells,
        }

    def render_text(self, decimals: int = 2) -> str:
        f = f"{{:.{decimals}f}}"
        lines = [f"{'component':<10} {'check':<23} {'at':>5}  {'published':>9}  {'reference':>9}  gap"]
        for c in self.components:
            for label, g in (("published-vs-calibrated", c.vs_calibrated), ("published-vs-golden", c.vs_golden)):
                lines.append(
                    f"{c.component:<10} {label:<23} {g.at:>5g}  {f.format(g.published):>9}  "
                    f"{f.format(g.reference):>9}  {f.format(g.size)}"
                )
        for name, p, cval in self.weight_gaps:
            lines.append(f"{'weight':<10} {name:<23} {'':>5}  {f.format(p):>9}  {f.format(cval):>9}  {f.format(abs(p - cval))}")
        return "\n".join(lines) + "\n"


def _worst(grid: Iterable[tuple[float, float, float]]) -> Gap:
    best: Gap | None = None
    for x, ref, pub in grid:
        g = Gap(x, ref, pub)
        if best is None or g.size > best.size:
            best = g
    if best is None:
        raise ValueError("empty comparison grid")
    return best


def recover_calibrated(golden: GoldenDataset, label: str = "CALIBRATED") -> tuple[ModelSet, DivergenceReport]:
    """Refit every model component to the golden rows and audit the published set."""
    rows = sorted(golden.class_rows, key=lambda r: (r.project, r.class_index, r.dit, r.rfc, r.wmc))
    dit_pairs = sorted({(r.dit, r.dp_dit) for r in rows if r.dit >= 1})
    rfc_pairs = sorted((r.rfc, r.dp_rfc) for r in rows)
    wmc_pairs = sorted((r.wmc, r.dp_wmc) for r in rows if r.wmc_trusted)
    dit_fit = fit_polynomial(dit_pairs, 3)
    rfc_fit = fit_polynomial(rfc_pairs, 2)
    wmc_fit = fit_polynomial(wmc_pairs, 2)
    w_fit = fit_weights((r.dp_dit, r.dp_rfc, r.dp_wmc, r.c_dpr) for r in rows)
    model = ModelSet.from_coefficients(
        label, dit_fit.coefficients, rfc_fit.coefficients, wmc_fit.coefficients, w_fit.coefficients
    )

    def component(name, pairs, fn, fitted) -> ComponentDivergence:
        xs = sorted({x for x, _ in pairs})
        return ComponentDivergence(
            name,
            _worst((x, fitted(x), fn(x, PUBLISHED)) for x in xs),
            _worst((x, y, fn(x, PUBLISHED)) for x, y in pairs),
        )

    comps = (
        component("DIT", dit_pairs, dp_dit, lambda x: dp_dit(x, model)),
        component("RFC", rfc_pairs, dp_rfc, lambda x: dp_rfc(x, model)),
        component("WMC", wmc_pairs, dp_wmc, lambda x: dp_wmc(x, model)),
    )
    weights = tuple(zip(("w_dit", "w_rfc", "w_wmc"), PUBLISHED.weights, model.weights))
    excluded = sum(not r.wmc_trusted for r in rows)
    return model, DivergenceReport(comps, weights, excluded)

