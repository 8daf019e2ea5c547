"""Machine-readable analysis records (one JSON object per analysis)."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Optional

from . import __version__
from .latent import TwoPointConstruction
from .table import Measure
from .threshold import ThresholdReport


def _ext(x):
    """Extended real for JSON: +/-inf are written as the strings "inf"/"-inf"."""
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return float(x)


def associations_dict(report: ThresholdReport) -> dict:
    out = {}
    for kind in Measure:
        a = report.associations.get(kind)
        out[kind.value] = None if a is None or a.boundary else a.value
    return out


def certificate_dict(construction: TwoPointConstruction, mu) -> dict:
    return {
        "theta1": construction.theta1,
        "theta2": construction.theta2,
        "k1": construction.k1,
        "k2": construction.k2,
        "atoms": [{"p": p, "r": r, "w": w} for p, r, w in mu.atoms],
    }


@dataclass
class AnalysisRecord:
    input: dict
    margins: dict
    associations: dict
    sigma_ed: float
    chi2_over_n: float
    threshold_T: float
    computation_path: str
    no_association: bool = False
    certificate: Optional[dict] = None
    bootstrap: Optional[dict] = None
    id: Optional[str] = None
    version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    @classmethod
    def from_report(cls, input_echo: dict, report: ThresholdReport, *, certificate=None, bootstrap=None, id=None):
        m = report.margins
        return cls(
            input=input_echo,
            margins={"pe": m.p_e, "pd": m.p_d, "balance_b": m.balance_b},
            associations=associations_dict(report),
            sigma_ed=report.sigma_ed,
            chi2_over_n=report.chi_squared_over_n,
            threshold_T=report.T,
            computation_path=report.computation_path.value,
            no_association=report.no_association,
            certificate=certificate,
            bootstrap=bootstrap,
            id=id,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("certificate", "bootstrap", "id"):
            if d[key] is None:
                del d[key]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> AnalysisRecord:
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> AnalysisRecord:
        return cls.from_dict(json.loads(text))


def error_record(code: str, message: str, id=None) -> dict:
    rec = {"error": {"code": code, "message": message}, "version": __version__}
    if id is not None:
        rec["id"] = id
    return rec


def bounds_dict(ranges) -> dict:
    return {
        kind.value: {
            "lower": _ext(r.lower),
            "upper": _ext(r.upper),
            "lower_attainable": r.lower_attainable,
            "upper_attainable": r.upper_attainable,
        }
        for kind, r in ranges.items()
    }
