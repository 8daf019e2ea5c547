"""Grids of T over association values or over prevalence space, written as CSV."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_open_probability
from .errors import EmptyRange, NotRealizable
from .realizability import range as realizable_range
from .table import GLOBAL_RANGE, AssociationMeasure, Measure
from .threshold import threshold_from_summary


@dataclass(frozen=True)
class SweepRow:
    coords: tuple
    realizable: bool
    T: float | None


@dataclass(frozen=True)
class SweepGrid:
    axes: tuple  # ((variable, lo, hi, steps), ...)
    fixed: dict
    rows: list = field(default_factory=list)

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(a[0] for a in self.axes)

    def T_values(self) -> np.ndarray:
        return np.array([np.nan if r.T is None else r.T for r in self.rows])

    def realizable_mask(self) -> np.ndarray:
        return np.array([r.realizable for r in self.rows])

    def to_csv(self, fh=None) -> str | None:
        """Write ``<axes>,realizable,T``; T is empty where unrealizable."""
        buf = io.StringIO() if fh is None else fh
        buf.write(",".join((*self.columns, "realizable", "T")) + "\n")
        for row in self.rows:
            vals = [repr(float(c)) for c in row.coords]
            vals.append("true" if row.realizable else "false")
            vals.append("" if row.T is None else repr(float(row.T)))
            buf.write(",".join(vals) + "\n")
        return buf.getvalue() if fh is None else None


def _evaluate(pe, pd, kind, value):
    try:
        return True, threshold_from_summary(pe, pd, AssociationMeasure(kind, value)).T
    except (NotRealizable, ValueError):
        return False, None


def sweep_T_vs_association(p_e, p_d, kind, lo, hi, steps) -> SweepGrid:
    """T at ``steps`` evenly spaced association values in [lo, hi].

    Values outside the realizable range (including its endpoints) are kept
    as rows marked unrealizable. Raises :class:`EmptyRange` when [lo, hi]
    misses the realizable range entirely.
    """
    pe = check_open_probability(p_e, "p_e")
    pd = check_open_probability(p_d, "p_d")
    kind = Measure.parse(kind)
    lo, hi, steps = float(lo), float(hi), int(steps)
    if steps < 1 or not (lo <= hi) or not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("need finite lo <= hi and steps >= 1")
    rng = realizable_range(pe, pd, kind)
    if hi <= rng.lower or lo >= rng.upper:
        raise EmptyRange(f"[{lo}, {hi}] does not meet the realizable range {rng.describe()}")
    values = np.linspace(lo, hi, steps) if steps > 1 else np.array([lo])
    rows = []
    for a in values:
        ok, T = _evaluate(pe, pd, kind, float(a))
        rows.append(SweepRow((float(a),), ok, T))
    return SweepGrid((("alpha", lo, hi, steps),), {"kind": kind.value, "p_e": pe, "p_d": pd}, rows)


def prevalence_axis(steps: int) -> np.ndarray:
    """Cell centers (i + 0.5) / steps, which stay inside the open interval."""
    return (np.arange(steps) + 0.5) / steps


def sweep_T_over_prevalence(kind, value, steps) -> SweepGrid:
    """T over a steps x steps grid of (p_e, p_d) at a fixed association value.

    Rows are row-major with p_e varying slowest.
    """
    kind = Measure.parse(kind)
    value = float(value)
    steps = int(steps)
    if steps < 2:
        raise ValueError("steps must be >= 2")
    glo, ghi = GLOBAL_RANGE[kind]
    if not (glo < value < ghi):
        raise ValueError(f"{kind.name} = {value!r} outside ({glo}, {ghi})")
    axis = prevalence_axis(steps)
    rows = []
    for pe in axis:
        for pd in axis:
            ok, T = _evaluate(float(pe), float(pd), kind, value)
            rows.append(SweepRow((float(pe), float(pd)), ok, T))
    axes = (("p_e", float(axis[0]), float(axis[-1]), steps), ("p_d", float(axis[0]), float(axis[-1]), steps))
    return SweepGrid(axes, {"kind": kind.value, "value": value}, rows)
