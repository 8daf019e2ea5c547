"""2x2 exposure/outcome tables: counts, cell probabilities and observed summaries.

Cell naming follows ``p_{ed}``: the first index is exposure, the second is
outcome. So ``n01`` counts unexposed cases and ``n10`` exposed non-cases.
"""

from __future__ import annotations

import csv
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import EPS_BOUNDARY, NORMALIZATION_TOL, check_count, check_table_array
from .errors import ZeroCell, ZeroCellWarning, ZeroMargin

CELL_NAMES = ("n01", "n11", "n00", "n10")


@dataclass(frozen=True)
class ContingencyTable:
    n01: int
    n11: int
    n00: int
    n10: int

    def __post_init__(self):
        for name in CELL_NAMES:
            object.__setattr__(self, name, check_count(getattr(self, name), name))
        if self.n < 1:
            raise ValueError("table is empty (total count is 0)")

    @classmethod
    def from_array(cls, values) -> ContingencyTable:
        """Build from a 4-vector or a 2x2 array [[n01, n11], [n00, n10]]."""
        return cls(*(v.item() for v in check_table_array(values)))

    @property
    def n(self) -> int:
        return self.n01 + self.n11 + self.n00 + self.n10

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n01, self.n11, self.n00, self.n10)

    def margin_counts(self) -> dict[str, int]:
        return {
            "exposed": self.n11 + self.n10,
            "unexposed": self.n01 + self.n00,
            "cases": self.n01 + self.n11,
            "non-cases": self.n00 + self.n10,
        }

    def check_margins(self) -> None:
        empty = [k for k, v in self.margin_counts().items() if v == 0]
        if empty:
            raise ZeroMargin(f"table has an empty margin: {', '.join(empty)} count is 0")

    def scaled(self, factor: int) -> ContingencyTable:
        return ContingencyTable(*(factor * v for v in self.as_tuple()))

    def swap_exposure(self) -> ContingencyTable:
        return ContingencyTable(self.n11, self.n01, self.n10, self.n00)

    def swap_outcome(self) -> ContingencyTable:
        return ContingencyTable(self.n00, self.n10, self.n01, self.n11)

    def transpose(self) -> ContingencyTable:
        """Exchange the roles of exposure and outcome."""
        return ContingencyTable(self.n10, self.n11, self.n00, self.n01)


@dataclass(frozen=True)
class CellProbabilities:
    """Relative frequencies (p01, p11, p00, p10).

    Values summing to 1 within ``NORMALIZATION_TOL`` are renormalized exactly.
    Both margins must lie strictly inside (0, 1); a single zero cell is
    allowed here and reported by :attr:`zero_cells`.
    """

    p01: float
    p11: float
    p00: float
    p10: float

    def __post_init__(self):
        vals = [float(getattr(self, k)) for k in ("p01", "p11", "p00", "p10")]
        if not all(math.isfinite(v) and v >= 0.0 for v in vals):
            raise ValueError(f"cell probabilities must be finite and >= 0, got {vals}")
        total = math.fsum(vals)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"cell probabilities sum to {total!r}, not 1")
        vals = [v / total for v in vals]
        for k, v in zip(("p01", "p11", "p00", "p10"), vals):
            object.__setattr__(self, k, v)
        pe, pd = vals[1] + vals[3], vals[1] + vals[0]
        for name, m in (("p_e", pe), ("p_d", pd)):
            if not (EPS_BOUNDARY < m < 1.0 - EPS_BOUNDARY):
                raise ZeroMargin(f"{name} = {m!r} is not inside (0, 1)")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p01, self.p11, self.p00, self.p10)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())

    @property
    def p_e(self) -> float:
        return self.p11 + self.p10

    @property
    def p_d(self) -> float:
        return self.p11 + self.p01

    @property
    def zero_cells(self) -> tuple[str, ...]:
        names = ("p01", "p11", "p00", "p10")
        return tuple(k for k, v in zip(names, self.as_tuple()) if v <= EPS_BOUNDARY)


@dataclass(frozen=True)
class Margins:
    p_e: float
    p_d: float
    balance_b: float


class Measure(str, enum.Enum):
    RD = "rd"
    RR = "rr"
    OR = "or"
    PHI = "phi"

    @classmethod
    def parse(cls, value) -> Measure:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown association measure {value!r}") from None


# kind -> (lower, upper) of the open range over all prevalences
GLOBAL_RANGE = {
    Measure.RD: (-1.0, 1.0),
    Measure.RR: (0.0, math.inf),
    Measure.OR: (0.0, math.inf),
    Measure.PHI: (-1.0, 1.0),
}

NULL_VALUE = {Measure.RD: 0.0, Measure.RR: 1.0, Measure.OR: 1.0, Measure.PHI: 0.0}


@dataclass(frozen=True)
class AssociationMeasure:
    """A tagged association value.

    ``boundary`` marks a value pushed to the edge of its range by a zero
    cell (RR or OR equal to 0 or infinity). Such values are never silently
    treated as ordinary numbers.
    """

    kind: Measure
    value: float
    boundary: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", Measure.parse(self.kind))
        value = float(self.value)
        object.__setattr__(self, "value", value)
        lo, hi = GLOBAL_RANGE[self.kind]
        if math.isnan(value):
            raise ValueError(f"{self.kind.name} is NaN")
        if not self.boundary and not (lo < value < hi):
            raise ValueError(
                f"{self.kind.name} = {value!r} is outside its range ({lo}, {hi})"
            )

    @property
    def is_null(self) -> bool:
        return not self.boundary and self.value == NULL_VALUE[self.kind]


def from_counts(table: ContingencyTable, *, allow_zero_cells: bool = False) -> CellProbabilities:
    """Normalize counts to relative frequencies.

    A zero cell raises :class:`ZeroCell` unless ``allow_zero_cells`` is set,
    in which case a :class:`ZeroCellWarning` is emitted instead. Two zero
    cells always raise.
    """
    table.check_margins()
    n = table.n
    cells = CellProbabilities(*(v / n for v in table.as_tuple()))
    zeros = [name for name, v in zip(CELL_NAMES, table.as_tuple()) if v == 0]
    if len(zeros) > 1:
        # with both margins positive this is a diagonal pair: |phi| = 1, T = 0
        raise ZeroCell(f"zero cells {', '.join(zeros)}: perfect association, T is undefined", zeros)
    if zeros:
        msg = f"zero cell {zeros[0]}: RR/OR are boundary-flagged"
        if not allow_zero_cells:
            raise ZeroCell(msg, zeros)
        warnings.warn(msg, ZeroCellWarning, stacklevel=2)
    return cells


def margins(cells: CellProbabilities) -> Margins:
    pe, pd = cells.p_e, cells.p_d
    return Margins(pe, pd, min(pe, 1.0 - pe, pd, 1.0 - pd))


def covariance_ed(cells: CellProbabilities) -> float:
    """Covariance of the exposure and outcome indicators, p11*p00 - p10*p01."""
    return cells.p11 * cells.p00 - cells.p10 * cells.p01


def phi(cells: CellProbabilities) -> float:
    pe, pd = cells.p_e, cells.p_d
    return covariance_ed(cells) / math.sqrt(pe * (1.0 - pe) * pd * (1.0 - pd))


def association(cells: CellProbabilities, kind) -> AssociationMeasure:
    kind = Measure.parse(kind)
    p01, p11, p00, p10 = cells.as_tuple()
    if kind is Measure.PHI:
        return AssociationMeasure(kind, phi(cells))
    if kind is Measure.RD:
        return AssociationMeasure(kind, p11 / (p11 + p10) - p01 / (p01 + p00))
    if kind is Measure.RR:
        num, den = p11 * (p01 + p00), (p11 + p10) * p01
    else:
        num, den = p11 * p00, p10 * p01
    if den == 0.0:
        return AssociationMeasure(kind, math.inf, boundary=True)
    if num == 0.0:
        return AssociationMeasure(kind, 0.0, boundary=True)
    return AssociationMeasure(kind, num / den)


def chi_squared(table: ContingencyTable) -> float:
    """Pearson chi-squared statistic of independence, no continuity correction."""
    table.check_margins()
    m = table.margin_counts()
    num = table.n * (table.n01 * table.n10 - table.n11 * table.n00) ** 2
    den = m["exposed"] * m["unexposed"] * m["cases"] * m["non-cases"]
    # exact integer arithmetic; one correctly rounded division
    return num / den


def read_tables_csv(path_or_file):
    """Yield ``(id, ContingencyTable | Exception)`` for each row of an ingestion CSV.

    The header must be ``id,n01,n11,n00,n10``. Malformed rows yield the
    exception in place of a table so that callers can report and move on.
    """
    close = False
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        fh = open(path_or_file, newline="", encoding="utf-8")
        close = True
    else:
        fh = path_or_file
    try:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return
        expected = ["id", *CELL_NAMES]
        if [f.strip() for f in reader.fieldnames] != expected:
            raise ValueError(f"CSV header must be {','.join(expected)}, got {reader.fieldnames}")
        for row in reader:
            row = {k.strip(): (v or "").strip() for k, v in row.items() if k is not None}
            try:
                table = ContingencyTable(*(_parse_int(row[k], k) for k in CELL_NAMES))
            except (TypeError, ValueError) as exc:
                yield row.get("id", ""), exc
            else:
                yield row["id"], table
    finally:
        if close:
            fh.close()


def _parse_int(text, name):
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"{name} is not an integer: {text!r}") from None
