"""End-to-end acceptance checks, one test per criterion."""

import json
import math
import time

import numpy as np
import pytest

from randthresh import (
    AssociationMeasure,
    CellProbabilities,
    ContingencyTable,
    Measure,
    association,
    bootstrap_T,
    chi_squared,
    covariance_ed,
    from_counts,
    is_realizable,
    margins,
    phi,
    realizable_range,
    sweep_T_over_prevalence,
    threshold_from_counts,
    threshold_from_summary,
    threshold_from_table,
    witness_table,
)
from randthresh.latent import optimality_oracle
from randthresh.realizability import all_ranges, sigma_bounds

from .conftest import COPD, ANCHOR, STROKE

criterion = pytest.mark.criterion


def T_summary(pe, pd, kind, value):
    return threshold_from_summary(pe, pd, AssociationMeasure(kind, value)).T


def _best_time(fn, repeat=200):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _strictly_decreasing(xs):
    return all(a > b for a, b in zip(xs, xs[1:]))


def _strictly_increasing(xs):
    return all(a < b for a, b in zip(xs, xs[1:]))


def _application(table, pe, pd, rr, T):
    report = threshold_from_counts(table)
    m = report.margins
    assert m.p_e == pytest.approx(pe, abs=5e-4)
    assert m.p_d == pytest.approx(pd, abs=5e-4)
    assert report.associations[Measure.RR].value == pytest.approx(rr, abs=0.05)
    assert report.T == pytest.approx(T, abs=5e-3)
    # summary route, from the rounded published triple and from the exact one
    assert T_summary(pe, pd, "rr", rr) == pytest.approx(T, abs=5e-3)
    exact = T_summary(m.p_e, m.p_d, "rr", report.associations[Measure.RR].value)
    assert exact == pytest.approx(report.T, abs=1e-10)
    return report


@criterion(1, "stroke table: margins, RR and T on table and RR paths, < 1 ms")
def test_criterion_1_stroke():
    _application(STROKE, 0.058, 0.021, 5.8, 0.87)
    assert _best_time(lambda: threshold_from_counts(STROKE)) < 1e-3
    assert _best_time(lambda: T_summary(0.058, 0.021, "rr", 5.8)) < 1e-3


@criterion(2, "COPD table: margins, RR and T; T_COPD < T_stroke while RR_COPD < RR_stroke")
def test_criterion_2_copd():
    copd = _application(COPD, 0.647, 0.138, 2.8, 0.84)
    stroke = threshold_from_counts(STROKE)
    assert copd.T < stroke.T
    assert copd.associations[Measure.RR].value < stroke.associations[Measure.RR].value


@criterion(3, "anchor cells (1/6, 2/6, 2/6, 1/6): RD, RR, OR, phi exact and T = 2/3 on four paths")
def test_criterion_3_anchor():
    cells = CellProbabilities(*ANCHOR)
    expect = {Measure.RD: 1 / 3, Measure.RR: 2.0, Measure.OR: 4.0, Measure.PHI: 1 / 3}
    for kind, v in expect.items():
        assert abs(association(cells, kind).value - v) <= 1e-12
    Ts = [threshold_from_table(cells).T]
    for kind in (Measure.RD, Measure.RR, Measure.OR):
        Ts.append(T_summary(0.5, 0.5, kind, expect[kind]))
    for T in Ts:
        assert abs(T - 2 / 3) <= 1e-12


@criterion(4, "table vs summary T on a 20x20x20 grid, |diff| < 1e-10 for RD, RR, OR, < 5 s")
def test_criterion_4_equivalence():
    t0 = time.perf_counter()
    axis = (np.arange(20) + 0.5) / 20
    worst = {k: 0.0 for k in ("rd", "rr", "or")}
    count = 0
    for pe in axis:
        for pd in axis:
            lo, hi = sigma_bounds(pe, pd)
            for frac in axis:
                cells = witness_table(pe, pd, lo + frac * (hi - lo))
                ref = threshold_from_table(cells).T
                for kind in worst:
                    got = T_summary(cells.p_e, cells.p_d, kind, association(cells, kind).value)
                    worst[kind] = max(worst[kind], abs(got - ref))
                count += 1
    elapsed = time.perf_counter() - t0
    assert count == 8000
    assert max(worst.values()) < 1e-10, worst
    assert elapsed < 5.0


@criterion(5, "chi-squared identity on 10^4 random tables, < 1e-12")
def test_criterion_5_chi_squared():
    rng = np.random.default_rng(20241014)
    scale = 10 ** rng.integers(1, 6, size=10_000)
    counts = rng.integers(1, scale[:, None] + 1, size=(10_000, 4))
    worst = 0.0
    for row in counts:
        t = ContingencyTable(*(int(x) for x in row))
        f = phi(from_counts(t))
        worst = max(worst, abs(math.sqrt(chi_squared(t) / t.n) - abs(f)))
    assert worst < 1e-12


@criterion(6, "optimality oracle on 50 random tables x 10^4 feasible distributions, < 60 s")
def test_criterion_6_optimality():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    for i in range(50):
        raw = rng.dirichlet(np.ones(4)) + 1e-3
        cells = CellProbabilities(*(raw / raw.sum()))
        res = optimality_oracle(cells, samples=10_000, seed=i)
        assert res.samples == 10_000
        assert res.optimal_feasibility_error <= 1e-12
        assert abs(res.optimal_R2 - res.abs_phi) <= 1e-12
        assert res.min_sampled_R2 >= res.abs_phi - 1e-9
        assert res.max_feasibility_error <= 1e-8
    assert time.perf_counter() - t0 < 60.0


PREVALENCE_PAIRS = [(0.5, 0.5), (0.3, 0.6), (0.058, 0.021), (0.647, 0.138), (0.8, 0.1), (0.2, 0.9)]


def _toward(null, end, n, log):
    if log:
        end = min(max(end, 1e-8), 1e8)
        return null * (end / null) ** np.linspace(0, 1, n + 2)[1:-1]
    return np.linspace(null, end, n + 2)[1:-1]


@criterion(7, "monotonicity: association, balance along rays, conditional RD/RR (>= 100 points each)")
def test_criterion_7_monotonicity():
    n = 120
    # T decreasing in |RD|, |RR - 1|, |OR - 1| at fixed prevalences, both directions
    for pe, pd in PREVALENCE_PAIRS:
        for kind, null, log in (("rd", 0.0, False), ("rr", 1.0, True), ("or", 1.0, True)):
            rng = realizable_range(pe, pd, kind)
            for end in (rng.lower, rng.upper):
                vals = _toward(null, end, n, log)
                assert _strictly_decreasing([T_summary(pe, pd, kind, v) for v in vals])

    # fixed OR: T increases (balance b decreases) moving out from (0.5, 0.5)
    radii = np.linspace(0, 0.49, n)
    for odds in (0.25, 4.0, 20.0):
        for k in range(8):
            theta = k * math.pi / 4
            pts = [(0.5 + r * math.cos(theta), 0.5 + r * math.sin(theta)) for r in radii]
            b = [min(pe, 1 - pe, pd, 1 - pd) for pe, pd in pts]
            assert _strictly_decreasing(b)
            assert _strictly_increasing([T_summary(pe, pd, "or", odds) for pe, pd in pts])

    # fixed RD and p_e: T decreasing in |p_d - 0.5|
    for rd, pe in ((0.1, 0.5), (-0.15, 0.3), (0.2, 0.7)):
        for side in (1, -1):
            pds = 0.5 + side * np.linspace(0, 0.499, 400)
            pts = [pd for pd in pds if is_realizable(pe, pd, AssociationMeasure("rd", rd))]
            assert len(pts) >= 100
            assert _strictly_decreasing([T_summary(pe, pd, "rd", rd) for pd in pts])
    # fixed RD and p_d: T increasing in |p_e - 0.5|
    for rd, pd in ((0.1, 0.5), (-0.15, 0.3), (0.2, 0.7)):
        for side in (1, -1):
            pes = 0.5 + side * np.linspace(0, 0.499, 400)
            pts = [pe for pe in pes if is_realizable(pe, pd, AssociationMeasure("rd", rd))]
            assert len(pts) >= 100
            assert _strictly_increasing([T_summary(pe, pd, "rd", rd) for pe in pts])
    # fixed RR and p_e: T decreasing in p_d
    for rr, pe in ((2.0, 0.3), (0.5, 0.4), (5.8, 0.058)):
        pds = np.linspace(0.001, 0.999, 999)
        pts = [pd for pd in pds if is_realizable(pe, pd, AssociationMeasure("rr", rr))]
        assert len(pts) >= 100
        assert _strictly_decreasing([T_summary(pe, pd, "rr", rr) for pd in pts])


def _limit_point(bound, side):
    """Association value approaching ``bound`` from inside the range.

    Finite nonzero bounds are approached to distance 1e-6. A zero bound is
    approached to 1e-12 and an infinite one to 1e12: T converges like
    sqrt(alpha) there, so distance 1e-6 still leaves a gap near 2e-3.
    """
    if math.isinf(bound):
        return 1e12
    if bound == 0.0:
        return 1e-12
    return bound - 1e-6 if side == "upper" else bound + 1e-6


@criterion(8, "limits: T -> 1 - u_phi / 1 + l_phi at each bound (1e-3); OR = 4 floor at (0.5, 0.5)")
def test_criterion_8_limits():
    axis = (np.arange(20) + 0.5) / 20
    for pe in axis:
        for pd in axis:
            r = all_ranges(pe, pd)
            top, bottom = 1 - r[Measure.PHI].upper, 1 + r[Measure.PHI].lower
            for kind in (Measure.RD, Measure.RR, Measure.OR):
                rng = r[kind]
                T_up = T_summary(pe, pd, kind, _limit_point(rng.upper, "upper"))
                T_lo = T_summary(pe, pd, kind, _limit_point(rng.lower, "lower"))
                assert abs(T_up - top) < 1e-3, (pe, pd, kind, "upper")
                assert abs(T_lo - bottom) < 1e-3, (pe, pd, kind, "lower")

    grid = sweep_T_over_prevalence("or", 4.0, 101)
    T = grid.T_values()
    assert grid.realizable_mask().all()
    centre = grid.rows[50 * 101 + 50]
    assert centre.coords == (0.5, 0.5)
    assert abs(centre.T - 2 / 3) < 1e-12
    assert abs(centre.T - (1 - (2 - 1) / (2 + 1))) < 1e-9
    assert T.min() == centre.T and np.sum(T == T.min()) == 1


@criterion(9, "bootstrap: byte-identical reruns; sd strictly shrinks over COPD x1, x10, x100; < 10 s")
def test_criterion_9_bootstrap():
    t0 = time.perf_counter()
    a = bootstrap_T(COPD, 10_000, seed=2024)
    b = bootstrap_T(COPD, 10_000, seed=2024, n_jobs=4)
    assert a.to_json(include_samples=True) == b.to_json(include_samples=True)
    assert a.samples.tobytes() == b.samples.tobytes()
    sds = [a.std] + [bootstrap_T(COPD.scaled(k), 10_000, seed=2024).std for k in (10, 100)]
    assert sds[0] > sds[1] > sds[2]
    assert json.loads(a.to_json())["replicates"] == 10_000
    assert time.perf_counter() - t0 < 10.0
