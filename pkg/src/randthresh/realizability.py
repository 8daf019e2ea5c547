"""Which (p_e, p_d, association) triples can come from a table in the open simplex."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from ._validation import check_open_probability
from .conversions import or_to_rr_raw, rd_from_rr
from .errors import SigmaOutOfRange
from .table import AssociationMeasure, CellProbabilities, Measure

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class RealizableRange:
    """Open interval (lower, upper) of realizable values; bounds are never attained."""

    kind: Measure
    lower: float
    upper: float
    lower_attainable: bool = False
    upper_attainable: bool = False

    def contains(self, value: float) -> bool:
        return self.lower < value < self.upper

    def boundary_distance(self, value: float) -> float:
        return min(abs(value - self.lower), abs(self.upper - value))

    def describe(self) -> str:
        return f"{fmt_ext(self.lower)} < {self.kind.name} < {fmt_ext(self.upper)}"


def fmt_ext(x: float) -> str:
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return f"{x:.6g}"


@dataclass(frozen=True)
class Realizability:
    realizable: bool
    range: RealizableRange
    witness: Optional[CellProbabilities] = None
    boundary: bool = False

    def __bool__(self):
        return self.realizable

    def reason(self) -> str:
        if self.realizable:
            return "realizable"
        where = "on the boundary of" if self.boundary else "outside"
        return f"{where} the realizable range {self.range.describe()}"


def sigma_bounds(pe, pd) -> tuple[float, float]:
    pe = check_open_probability(pe, "p_e")
    pd = check_open_probability(pd, "p_d")
    lower = -min(pe * pd, (1.0 - pe) * (1.0 - pd))
    upper = min(pe * (1.0 - pd), pd * (1.0 - pe))
    return lower, upper


def range(pe, pd, kind) -> RealizableRange:  # noqa: A001 - public name
    pe = check_open_probability(pe, "p_e")
    pd = check_open_probability(pd, "p_d")
    kind = Measure.parse(kind)
    if kind is Measure.RD:
        lower = -min(pd / (1.0 - pe), (1.0 - pd) / pe)
        upper = min(pd / pe, (1.0 - pd) / (1.0 - pe))
    elif kind is Measure.RR:
        lower = max(0.0, (pe + pd - 1.0) / pe)
        upper = (1.0 - pe) / (pd - pe) if pe < pd else math.inf
    elif kind is Measure.OR:
        lower, upper = 0.0, math.inf
    else:
        upper = math.sqrt(min(pe * (1.0 - pd) / (pd * (1.0 - pe)), pd * (1.0 - pe) / (pe * (1.0 - pd))))
        lower = -math.sqrt(min(pe * pd / ((1.0 - pe) * (1.0 - pd)), (1.0 - pe) * (1.0 - pd) / (pe * pd)))
    return RealizableRange(kind, lower, upper)


def all_ranges(pe, pd) -> dict[Measure, RealizableRange]:
    return {kind: range(pe, pd, kind) for kind in Measure}


def sigma_from_association(pe, pd, alpha: AssociationMeasure) -> float:
    """Covariance sigma_ed implied by an association value at prevalences (pe, pd).

    No realizability check; callers test :func:`is_realizable` first.
    """
    kind, value = alpha.kind, alpha.value
    var_e = pe * (1.0 - pe)
    if kind is Measure.RD:
        return value * var_e
    if kind is Measure.PHI:
        return value * math.sqrt(var_e * pd * (1.0 - pd))
    rr = value if kind is Measure.RR else or_to_rr_raw(pe, pd, value)
    return rd_from_rr(pe, pd, rr) * var_e


def is_realizable(pe, pd, alpha: AssociationMeasure) -> Realizability:
    """Strict membership test against the open realizable range.

    Values within ``BOUNDARY_TOL`` of a finite bound are reported with
    ``boundary=True`` and treated as not realizable.
    """
    try:
        pe = check_open_probability(pe, "p_e")
        pd = check_open_probability(pd, "p_d")
    except ValueError:
        nan_range = RealizableRange(alpha.kind, math.nan, math.nan)
        return Realizability(False, nan_range)
    rng = range(pe, pd, alpha.kind)
    value = alpha.value
    near = rng.boundary_distance(value) < BOUNDARY_TOL
    if alpha.boundary or near or not rng.contains(value):
        return Realizability(False, rng, boundary=alpha.boundary or near)
    try:
        witness = witness_table(pe, pd, sigma_from_association(pe, pd, alpha))
    except SigmaOutOfRange:
        # closed-form range admits it, but rounding pushed a cell to zero
        return Realizability(False, rng, boundary=True)
    return Realizability(True, rng, witness=witness)


def witness_table(pe, pd, sigma_ed) -> CellProbabilities:
    """The unique table with margins (pe, pd) and covariance sigma_ed."""
    lower, upper = sigma_bounds(pe, pd)
    sigma_ed = float(sigma_ed)
    if not (lower < sigma_ed < upper):
        raise SigmaOutOfRange(
            f"sigma_ed = {sigma_ed!r} outside ({lower!r}, {upper!r}) for p_e={pe}, p_d={pd}"
        )
    p11 = pe * pd + sigma_ed
    p10 = pe - p11
    p01 = pd - p11
    p00 = 1.0 - pe - pd + p11
    if min(p01, p11, p00, p10) <= 0.0:
        raise SigmaOutOfRange(f"sigma_ed = {sigma_ed!r} leaves a non-positive cell")
    return CellProbabilities(p01, p11, p00, p10)
