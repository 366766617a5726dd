"""Exit criteria. Each test carries an ``acceptance`` marker; the terminal summary
prints one PASS/FAIL line per criterion."""

import itertools
import math
import random

import pytest

from ckdefect.calibration import fit_polynomial, fit_weights, load_golden, recover_calibrated
from ckdefect.estimation import (
    CALIBRATED, PUBLISHED, Flag, FlagLevel, class_dpi, dp_dit, dp_rfc, dp_wmc, influence, project_dpi,
    threshold_flags,
)
from ckdefect.frontend import build_model, discover_sources, parse_source
from ckdefect.metrics import MetricVector, WmcMode, compute_all
from ckdefect.model import ingest_model

from test_metrics import oracle_metrics, random_document

GOLDEN = load_golden()
WEIGHTS = (0.25, 0.37, 0.42)
PRINTED_P_DPR = {"I": 7.39, "II": 14.29, "III": 13.76, "IV": 21.98, "V": 20.72}

# influence table transcribed independently of the package constants
KNOTS = {
    "DIT": [(1, 9), (2, 21), (3, 36), (4, 56), (5, 74), (6, 98)],
    "RFC": [(1, 3), (23, 31), (45, 56), (60, 80), (80, 91), (100, 78), (120, 62), (149, 51), (170, 40),
            (198, 26), (222, 7)],
    "WMC": [(1, 5), (5, 25), (10, 42), (12, 63), (16, 80), (20, 92), (30, 75), (50, 54), (60, 40), (70, 10),
            (96, 2)],
}

CORPUS = {
    # class: (dit, rfc, wmc count, wmc cyclomatic), counted by hand from the fixture sources
    "MathUtil": (0, 4, 3, 6),
    "Point": (0, 5, 4, 5),
    "Polygon": (1, 6, 3, 4),
    "RightTriangle": (3, 5, 3, 5),
    "Shape": (0, 4, 3, 3),
    "Triangle": (2, 4, 3, 4),
}


def vector(row):
    return MetricVector(f"{row.project}/{row.class_index}", row.dit, row.rfc, row.wmc)


@pytest.mark.acceptance(1, "golden component reproduction (trusted cells, +-0.05)")
def test_criterion_1_component_reproduction():
    worst = 0.0
    checked = 0
    for row in GOLDEN.class_rows:
        prof = class_dpi(vector(row), CALIBRATED)
        cells = [(prof.dp_dit, row.dp_dit), (prof.dp_rfc, row.dp_rfc)]
        if row.wmc_trusted:
            cells.append((prof.dp_wmc, row.dp_wmc))
        for got, printed in cells:
            worst = max(worst, abs(got - printed))
            checked += 1
    assert checked == 35 * 2 + 24
    assert worst <= 0.05


@pytest.mark.acceptance(2, "golden combination reproduction (C-DPR and P-DPR, +-0.02)")
def test_criterion_2_combination_reproduction():
    assert len(GOLDEN.class_rows) == 35
    for row in GOLDEN.class_rows:
        combined = WEIGHTS[0] * row.dp_dit + WEIGHTS[1] * row.dp_rfc + WEIGHTS[2] * row.dp_wmc
        assert combined == pytest.approx(row.c_dpr, abs=0.02), row
    for proj in GOLDEN.project_rows:
        means = (proj.mean_dp_dit, proj.mean_dp_rfc, proj.mean_dp_wmc)
        combined = sum(w * m for w, m in zip(WEIGHTS, means))
        assert combined == pytest.approx(PRINTED_P_DPR[proj.project], abs=0.02)
        assert proj.p_dpr == PRINTED_P_DPR[proj.project]
    assert CALIBRATED.weights == WEIGHTS
    # the full pipeline reproduces every project whose inputs are intact
    for pid in ("I", "II", "III", "V"):
        prof = project_dpi([vector(r) for r in GOLDEN.rows_for(pid)], CALIBRATED, pid)
        assert prof.p_dpr == pytest.approx(PRINTED_P_DPR[pid], abs=0.02)


@pytest.mark.acceptance(3, "calibration recovery")
def test_criterion_3_calibration_recovery():
    dit_points = sorted({(r.dit, r.dp_dit) for r in GOLDEN.class_rows})
    first_four = [p for p in dit_points if p[0] <= 4]
    assert [x for x, _ in first_four] == [1, 2, 3, 4]
    fit = fit_polynomial(first_four, 3)
    assert fit.coefficients == pytest.approx((-1.6, 16.86, -35.3, 30.67), abs=1e-6)
    a, b, c, d = fit.coefficients
    for x, expected in ((5, 75.67), (6, 80.23)):
        assert a * x**3 + b * x**2 + c * x + d == pytest.approx(expected, abs=0.01)

    rows = [(r.dp_dit, r.dp_rfc, r.dp_wmc, r.c_dpr) for r in GOLDEN.class_rows if r.wmc_trusted]
    assert len(rows) >= 10
    assert fit_weights(rows).coefficients == pytest.approx(WEIGHTS, abs=0.005)

    wmc_fit = fit_polynomial([(r.wmc, r.dp_wmc) for r in GOLDEN.class_rows if r.wmc_trusted], 2)
    assert wmc_fit.coefficients == pytest.approx((0.0043, 0.4, 4.3), abs=1e-3)

    model, _ = recover_calibrated(GOLDEN)
    assert model.weights == pytest.approx(WEIGHTS, abs=0.005)


@pytest.mark.acceptance(4, "divergence audit (DIT 10.80 at 6, RFC 0.68 at 93)")
def test_criterion_4_divergence_audit():
    _, report = recover_calibrated(GOLDEN)
    dit = report.component("DIT").vs_calibrated
    assert dit.at == 6
    assert (dit.published, dit.reference) == (pytest.approx(91.03, abs=0.005), pytest.approx(80.23, abs=0.005))
    assert dit.size == pytest.approx(10.80, abs=0.01)
    rfc = report.component("RFC").vs_golden
    assert rfc.at == 93
    assert rfc.size == pytest.approx(0.68, abs=0.05)
    # cross-check against direct evaluation of both built-in sets
    assert dp_dit(6, PUBLISHED) - dp_dit(6, CALIBRATED) == pytest.approx(10.80, abs=0.01)
    printed_93 = next(r.dp_rfc for r in GOLDEN.class_rows if r.rfc == 93)
    assert abs(dp_rfc(93, PUBLISHED) - printed_93) == pytest.approx(0.68, abs=0.05)
    assert dict((n, p) for n, p, _ in report.weight_gaps)["w_wmc"] == 0.38


@pytest.mark.acceptance(5, "metrics agree with brute-force oracle on 1000 random models")
def test_criterion_5_metrics_oracle():
    rng = random.Random(5150)
    for _ in range(1000):
        doc = random_document(rng)
        assert len(doc["classes"]) <= 10
        assert all(len(c["methods"]) <= 8 for c in doc["classes"])
        expected = oracle_metrics(doc)
        model = ingest_model(doc)
        count = {v.class_name: (v.dit, v.rfc, v.wmc) for v in compute_all(model, WmcMode.COUNT)}
        cyclo = {v.class_name: v.wmc for v in compute_all(model, WmcMode.CYCLOMATIC)}
        assert count == {n: e[:3] for n, e in expected.items()}
        assert cyclo == {n: e[3] for n, e in expected.items()}


@pytest.mark.acceptance(6, "property suite (monotonicity, means, influence knots, threshold boundaries)")
def test_criterion_6_properties():
    for model in (PUBLISHED, CALIBRATED):
        rfc = [dp_rfc(x, model) for x in range(223)]
        wmc = [dp_wmc(x, model) for x in range(101)]
        assert all(a < b for a, b in zip(rfc, rfc[1:]))
        assert all(a < b for a, b in zip(wmc, wmc[1:]))
    dit = [dp_dit(x, CALIBRATED) for x in range(1, 7)]
    assert all(a < b for a, b in zip(dit, dit[1:]))

    rng = random.Random(66)
    for _ in range(200):
        vs = [MetricVector(str(i), rng.randint(0, 7), rng.randint(0, 240), rng.randint(0, 110))
              for i in range(rng.randint(1, 30))]
        prof = project_dpi(vs, CALIBRATED)
        assert abs(prof.p_dpr - math.fsum(p.c_dpr for p in prof.class_profiles) / len(vs)) <= 1e-9

    count = 0
    for metric, knots in KNOTS.items():
        for x, y in knots:
            assert influence(metric, x) == (float(y), False)
            count += 1
    assert count == 28

    def flags(d=0, r=0, w=0):
        return threshold_flags(MetricVector("c", d, r, w))

    assert flags(d=3) == [Flag("DIT", FlagLevel.WARN)]
    assert flags(d=6) == [Flag("DIT", FlagLevel.WARN)]
    assert flags(w=20) == [Flag("WMC", FlagLevel.WARN)]
    assert flags(w=100) == [Flag("WMC", FlagLevel.WARN)]
    assert flags(r=50) == [Flag("RFC", FlagLevel.WARN)]
    assert flags(r=222) == [Flag("RFC", FlagLevel.SECONDARY_WARN)]
    # one step past each boundary
    assert flags(d=2) == flags(w=19) == flags(r=49) == []
    assert flags(d=7) == [Flag("DIT", FlagLevel.MAX_EXCEEDED)]
    assert flags(r=223) == [Flag("RFC", FlagLevel.MAX_EXCEEDED)]
    assert flags(w=101) == [Flag("WMC", FlagLevel.MAX_EXCEEDED)]


@pytest.mark.acceptance(7, "frontend corpus vectors and file-order invariance")
def test_criterion_7_frontend_corpus(corpus_dir):
    files = discover_sources([corpus_dir])
    units = [parse_source(p.read_text(encoding="utf-8"), str(p)) for p in files]
    model = build_model(units)
    assert len(model.classes) >= 5
    count = {v.class_name: (v.dit, v.rfc, v.wmc) for v in compute_all(model, WmcMode.COUNT)}
    cyclo = {v.class_name: v.wmc for v in compute_all(model, WmcMode.CYCLOMATIC)}
    assert count == {n: e[:3] for n, e in CORPUS.items()}
    assert cyclo == {n: e[3] for n, e in CORPUS.items()}
    assert max(d for d, *_ in CORPUS.values()) >= 3
    reference = compute_all(model)
    for perm in itertools.islice(itertools.permutations(units), 0, 5040, 101):
        assert compute_all(build_model(list(perm))) == reference


@pytest.mark.acceptance(8, "industrial range claim not reproducible; documented substitute holds")
def test_criterion_8_not_reproducible_at_desk_scale():
    # The 8.23..44.18 range spans twenty proprietary projects and cannot be recomputed.
    # Only five projects are available; their class-level extremes differ from that
    # range, which is recorded here instead of being forced to match.
    assert GOLDEN.projects == ["I", "II", "III", "IV", "V"]
    c_dpr = [r.c_dpr for r in GOLDEN.class_rows]
    assert (min(c_dpr), max(c_dpr)) == (5.87, 43.83)
    assert (min(c_dpr), max(c_dpr)) != (8.23, 44.18)
    p_dpr = sorted(PRINTED_P_DPR.values())
    assert (p_dpr[0], p_dpr[-1]) == (7.39, 21.98)
    assert not (8.23 <= p_dpr[0] and p_dpr[-1] <= 44.18)
