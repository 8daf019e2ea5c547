"""Threshold of sufficient randomness, T = 1 - |phi|.

T can be computed from the cells of a table or from a summary triple
(p_e, p_d, association). The module also holds the OR <-> RR conversions
and the decision rule eta > T.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from ._validation import check_open_probability, check_unit_interval
from .conversions import or_quadratic_residual, or_to_rr_raw, rd_from_rr, rr_to_or_raw, sd_ratio
from .errors import NotRealizable
from .realizability import fmt_ext, is_realizable, range as realizable_range
from .table import (
    AssociationMeasure,
    CellProbabilities,
    ContingencyTable,
    Margins,
    Measure,
    association,
    chi_squared,
    covariance_ed,
    from_counts,
    margins,
    phi as phi_coefficient,
)


class ComputationPath(str, enum.Enum):
    FROM_TABLE = "from_table"
    FROM_SUMMARY_RD = "from_summary_rd"
    FROM_SUMMARY_RR = "from_summary_rr"
    FROM_SUMMARY_OR = "from_summary_or"
    FROM_SUMMARY_PHI = "from_summary_phi"


_SUMMARY_PATH = {
    Measure.RD: ComputationPath.FROM_SUMMARY_RD,
    Measure.RR: ComputationPath.FROM_SUMMARY_RR,
    Measure.OR: ComputationPath.FROM_SUMMARY_OR,
    Measure.PHI: ComputationPath.FROM_SUMMARY_PHI,
}


@dataclass(frozen=True)
class ThresholdReport:
    T: float
    phi: float
    sigma_ed: float
    margins: Margins
    associations: dict  # Measure -> AssociationMeasure
    chi_squared_over_n: float
    computation_path: ComputationPath
    no_association: bool = False
    cells: CellProbabilities | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.T != 1.0 - abs(self.phi):
            raise AssertionError("T must equal 1 - |phi|")
        if not (0.0 < self.T <= 1.0):
            raise AssertionError(f"T = {self.T!r} outside (0, 1]")


@dataclass(frozen=True)
class RandomnessSpec:
    """Elicited coefficients of determinism for propensity and risk."""

    R2_p: float
    R2_r: float

    def __post_init__(self):
        object.__setattr__(self, "R2_p", check_unit_interval(self.R2_p, "R2_p"))
        object.__setattr__(self, "R2_r", check_unit_interval(self.R2_r, "R2_r"))

    @property
    def R2(self) -> float:
        return math.sqrt(self.R2_p * self.R2_r)

    @property
    def eta(self) -> float:
        return 1.0 - self.R2


class Verdict(str, enum.Enum):
    WARRANTED = "warranted"
    NOT_WARRANTED = "not_warranted"


@dataclass(frozen=True)
class Decision:
    eta: float
    T: float
    margin: float
    verdict: Verdict

    @property
    def warranted(self) -> bool:
        return self.verdict is Verdict.WARRANTED


def threshold_from_table(cells: CellProbabilities) -> ThresholdReport:
    m = margins(cells)
    sigma = covariance_ed(cells)
    phi = phi_coefficient(cells)
    assoc = {kind: association(cells, kind) for kind in Measure}
    return ThresholdReport(
        T=1.0 - abs(phi),
        phi=phi,
        sigma_ed=sigma,
        margins=m,
        associations=assoc,
        chi_squared_over_n=sigma * sigma / (m.p_e * (1 - m.p_e) * m.p_d * (1 - m.p_d)),
        computation_path=ComputationPath.FROM_TABLE,
        no_association=sigma == 0.0,
        cells=cells,
    )


def threshold_from_counts(table: ContingencyTable, *, allow_zero_cells: bool = True) -> ThresholdReport:
    """Like :func:`threshold_from_table`, with chi^2/n taken from the exact counts."""
    cells = from_counts(table, allow_zero_cells=allow_zero_cells)
    report = threshold_from_table(cells)
    chi2_n = chi_squared(table) / table.n
    return replace(report, chi_squared_over_n=chi2_n)


def threshold_from_summary(p_e, p_d, alpha: AssociationMeasure) -> ThresholdReport:
    """T from prevalences and one association measure.

    Raises :class:`NotRealizable` when no open-simplex table has this
    summary. A null association (RD=0, RR=1, OR=1, phi=0) gives T = 1 with
    ``no_association`` set.
    """
    pe = check_open_probability(p_e, "p_e")
    pd = check_open_probability(p_d, "p_d")
    kind, value = alpha.kind, alpha.value
    real = is_realizable(pe, pd, alpha)
    if not real:
        raise NotRealizable(
            f"{kind.name}={fmt_ext(value)} is not realizable at p_e={pe:g}, p_d={pd:g}: "
            f"{real.reason()}"
        )
    k = sd_ratio(pe, pd)
    if kind is Measure.PHI:
        phi = value
    elif kind is Measure.RD:
        phi = value * k
    elif kind is Measure.RR:
        phi = rd_from_rr(pe, pd, value) * k
    else:
        phi = rd_from_rr(pe, pd, or_to_rr_raw(pe, pd, value)) * k
    if alpha.is_null:
        phi = 0.0
    var_prod = pe * (1.0 - pe) * pd * (1.0 - pd)
    witness = real.witness
    assoc = {m: association(witness, m) for m in Measure}
    assoc[kind] = alpha
    return ThresholdReport(
        T=1.0 - abs(phi),
        phi=phi,
        sigma_ed=phi * math.sqrt(var_prod),
        margins=Margins(pe, pd, min(pe, 1.0 - pe, pd, 1.0 - pd)),
        associations=assoc,
        chi_squared_over_n=phi * phi,
        computation_path=_SUMMARY_PATH[kind],
        no_association=alpha.is_null,
        cells=witness,
    )


def threshold(data, alpha: AssociationMeasure | None = None, p_d=None) -> ThresholdReport:
    """Dispatch on input form: a table, cells, or ``threshold(p_e, alpha, p_d)``."""
    if isinstance(data, ContingencyTable):
        return threshold_from_counts(data)
    if isinstance(data, CellProbabilities):
        return threshold_from_table(data)
    if alpha is None or p_d is None:
        raise TypeError("summary input needs p_e, alpha and p_d")
    return threshold_from_summary(data, p_d, alpha)


def or_to_rr(p_e, p_d, odds_ratio) -> float:
    """Relative risk implied by an odds ratio at prevalences (p_e, p_d)."""
    pe = check_open_probability(p_e, "p_e")
    pd = check_open_probability(p_d, "p_d")
    odds_ratio = float(odds_ratio)
    if not (0.0 < odds_ratio < math.inf):
        raise ValueError(f"OR must be positive and finite, got {odds_ratio!r}")
    if odds_ratio == 1.0:
        return 1.0
    return or_to_rr_raw(pe, pd, odds_ratio)


def rr_to_or(p_e, p_d, rr) -> float:
    pe = check_open_probability(p_e, "p_e")
    pd = check_open_probability(p_d, "p_d")
    rng = realizable_range(pe, pd, Measure.RR)
    if not rng.contains(float(rr)):
        raise NotRealizable(f"RR={rr!r} is not realizable at p_e={pe:g}, p_d={pd:g}: {rng.describe()}")
    if rr == 1.0:
        return 1.0
    return rr_to_or_raw(pe, pd, float(rr))


def quadratic_residual(p_e, p_d, odds_ratio, rr) -> float:
    return or_quadratic_residual(p_e, p_d, odds_ratio, rr)


def decide(spec: RandomnessSpec, report: ThresholdReport) -> Decision:
    eta = spec.eta
    verdict = Verdict.WARRANTED if eta > report.T else Verdict.NOT_WARRANTED
    return Decision(eta=eta, T=report.T, margin=eta - report.T, verdict=verdict)
