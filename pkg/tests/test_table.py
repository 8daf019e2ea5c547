import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from scipy.stats import chi2_contingency

from randthresh import (
    AssociationMeasure,
    CellProbabilities,
    ContingencyTable,
    Measure,
    ZeroCell,
    ZeroCellWarning,
    ZeroMargin,
    association,
    chi_squared,
    covariance_ed,
    from_counts,
    margins,
    phi,
)
from randthresh.table import read_tables_csv

from .conftest import COPD, ANCHOR, STROKE, open_cells, tables


def test_from_counts_stroke():
    c = from_counts(STROKE)
    assert c.as_tuple() == pytest.approx((0.015226, 0.005404, 0.926946, 0.052424), abs=1e-6)


def test_from_counts_copd():
    c = from_counts(COPD)
    assert c.as_tuple() == pytest.approx((0.0224, 0.1151, 0.3303, 0.5321), abs=5e-5)


def test_from_counts_uniform():
    assert from_counts(ContingencyTable(1, 1, 1, 1)).as_tuple() == (0.25,) * 4


def test_margins_examples(stroke_cells, copd_cells, anchor_cells):
    m = margins(stroke_cells)
    assert m.p_e == pytest.approx(0.058, abs=5e-4)
    assert m.p_d == pytest.approx(0.021, abs=5e-4)
    m = margins(copd_cells)
    assert m.p_e == pytest.approx(0.647, abs=5e-4)
    assert m.p_d == pytest.approx(0.138, abs=5e-4)
    m = margins(anchor_cells)
    assert (m.p_e, m.p_d, m.balance_b) == pytest.approx((0.5, 0.5, 0.5), abs=1e-15)


def test_covariance_examples(stroke_cells, anchor_cells):
    assert covariance_ed(anchor_cells) == pytest.approx(1 / 12, abs=1e-15)
    assert covariance_ed(CellProbabilities(0.08, 0.12, 0.32, 0.48)) == pytest.approx(0.0, abs=1e-15)
    n01, n11, n00, n10 = (v / STROKE.n for v in STROKE.as_tuple())
    assert covariance_ed(stroke_cells) == pytest.approx(n11 * n00 - n10 * n01, rel=1e-12)
    assert covariance_ed(stroke_cells) == pytest.approx(0.004211, abs=5e-7)


def test_association_examples(stroke_cells, copd_cells, anchor_cells):
    assert association(stroke_cells, "rr").value == pytest.approx(5.8, abs=0.05)
    assert association(copd_cells, Measure.RR).value == pytest.approx(2.8, abs=0.05)
    expect = {Measure.RD: 1 / 3, Measure.RR: 2.0, Measure.OR: 4.0, Measure.PHI: 1 / 3}
    for kind, v in expect.items():
        assert abs(association(anchor_cells, kind).value - v) <= 1e-12


def test_association_zero_cell_is_boundary():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroCellWarning)
        c = from_counts(ContingencyTable(5, 3, 7, 0), allow_zero_cells=True)
    odds = association(c, "or")
    assert odds.boundary and odds.value == math.inf
    assert not association(c, "rr").boundary
    assert not association(c, "rd").boundary


def test_zero_cell_policy():
    t = ContingencyTable(5, 3, 7, 0)
    with pytest.raises(ZeroCell) as exc:
        from_counts(t)
    assert tuple(exc.value.cells) == ("n10",)
    with pytest.warns(ZeroCellWarning):
        from_counts(t, allow_zero_cells=True)


def test_zero_margin():
    with pytest.raises(ZeroMargin):
        from_counts(ContingencyTable(0, 0, 4, 5))
    with pytest.raises(ZeroMargin):
        CellProbabilities(0.5, 0.5, 0.0, 0.0)


def test_invalid_counts():
    with pytest.raises(ValueError):
        ContingencyTable(-1, 2, 3, 4)
    with pytest.raises((TypeError, ValueError)):
        ContingencyTable(1.5, 2, 3, 4)


def test_association_measure_range():
    with pytest.raises(ValueError):
        AssociationMeasure("rr", -1.0)
    with pytest.raises(ValueError):
        AssociationMeasure("phi", 1.0)
    with pytest.raises(ValueError):
        AssociationMeasure("xx", 1.0)
    assert AssociationMeasure("or", 1.0).is_null


def test_chi_squared_examples():
    assert chi_squared(ContingencyTable(1, 1, 1, 1)) == 0.0
    assert chi_squared(ContingencyTable(1, 2, 2, 1)) == pytest.approx(2 / 3, rel=1e-14)
    c = from_counts(STROKE)
    n01, n11, n00, n10 = STROKE.as_tuple()
    f = (n11 * n00 - n10 * n01) / math.sqrt((n11 + n10) * (n01 + n00) * (n01 + n11) * (n00 + n10))
    assert chi_squared(STROKE) == pytest.approx(STROKE.n * f * f, rel=1e-12)
    assert phi(c) == pytest.approx(f, rel=1e-12)


@given(tables())
def test_chi_squared_matches_scipy(t):
    n01, n11, n00, n10 = t.as_tuple()
    ref = chi2_contingency([[n11, n10], [n01, n00]], correction=False)[0]
    assert chi_squared(t) == pytest.approx(ref, rel=1e-9, abs=1e-9)


@given(tables())
def test_chi_squared_identity(t):
    c = from_counts(t, allow_zero_cells=True)
    assert abs(math.sqrt(chi_squared(t) / t.n) - abs(phi(c))) < 1e-12


@given(tables())
def test_exposure_swap_negates(t):
    a = from_counts(t)
    b = from_counts(t.swap_exposure())
    assert phi(b) == pytest.approx(-phi(a), abs=1e-12)
    assert covariance_ed(b) == pytest.approx(-covariance_ed(a), abs=1e-15)


@given(tables())
def test_outcome_swap_negates(t):
    a = from_counts(t)
    b = from_counts(t.swap_outcome())
    assert phi(b) == pytest.approx(-phi(a), abs=1e-12)
    assert covariance_ed(b) == pytest.approx(-covariance_ed(a), abs=1e-15)


@given(tables())
def test_transpose_keeps_phi(t):
    assert phi(from_counts(t.transpose())) == pytest.approx(phi(from_counts(t)), abs=1e-12)


@given(tables(max_count=1000))
def test_scale_invariance(t):
    a = from_counts(t)
    b = from_counts(t.scaled(7))
    np.testing.assert_allclose(b.as_array(), a.as_array(), rtol=1e-14)
    for kind in Measure:
        assert association(b, kind).value == pytest.approx(association(a, kind).value, rel=1e-12)


@given(open_cells())
def test_phi_open_interval(c):
    assert -1 < phi(c) < 1


def test_table_layouts():
    t = ContingencyTable.from_array([[1823, 647], [110986, 6277]])
    assert t == STROKE
    assert ContingencyTable.from_array(STROKE.as_tuple()) == STROKE


def test_anchor_constant():
    assert CellProbabilities(*ANCHOR).as_tuple() == pytest.approx(ANCHOR)


def test_read_tables_csv(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("id,n01,n11,n00,n10\nstroke,1823,647,110986,6277\nbad,0,0,1,1\nneg,-1,2,3,4\n")
    rows = list(read_tables_csv(p))
    assert rows[0] == ("stroke", STROKE)
    assert rows[1][0] == "bad"
    assert isinstance(rows[2][1], Exception)


def test_read_tables_csv_header(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError):
        list(read_tables_csv(p))


def test_two_zero_cells_always_raise():
    for t in (ContingencyTable(5, 0, 0, 5), ContingencyTable(0, 5, 5, 0)):
        with pytest.raises(ZeroCell, match="perfect association"):
            from_counts(t, allow_zero_cells=True)
