"""Parametric multinomial bootstrap for the threshold T."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_seed
from .errors import AllDegenerate
from .table import ContingencyTable

DEFAULT_LEVELS = (0.025, 0.25, 0.5, 0.75, 0.975)


@dataclass(frozen=True)
class BootstrapResult:
    point_T: float
    replicates: int
    seed: int
    samples: np.ndarray = field(repr=False)
    quantiles: dict
    n_degenerate: int

    @property
    def std(self) -> float:
        return float(np.std(self.samples, ddof=1)) if self.samples.size > 1 else 0.0

    @property
    def iqr(self) -> float:
        lo, hi = np.quantile(self.samples, [0.25, 0.75])
        return float(hi - lo)

    def to_dict(self, include_samples: bool = False) -> dict:
        out = {
            "point_T": self.point_T,
            "replicates": self.replicates,
            "seed": self.seed,
            "n_degenerate": self.n_degenerate,
            "sd": self.std,
            "quantiles": {repr(float(k)): float(v) for k, v in self.quantiles.items()},
        }
        if include_samples:
            out["samples"] = [float(x) for x in self.samples]
        return out

    def to_json(self, include_samples: bool = False) -> str:
        return json.dumps(self.to_dict(include_samples), sort_keys=True)


def _replicate_rng(seed: int, index: int) -> np.random.Generator:
    # one independent counter-based stream per (seed, replicate)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _draw_counts(n, probs, seed, start, stop):
    out = np.empty((stop - start, 4), dtype=np.int64)
    for j, i in enumerate(range(start, stop)):
        out[j] = _replicate_rng(seed, i).multinomial(n, probs)
    return out


def thresholds_from_count_array(counts: np.ndarray):
    """T for each row of an (m, 4) array of (n01, n11, n00, n10); NaN where a margin is empty."""
    c = np.asarray(counts, dtype=float)
    n01, n11, n00, n10 = c.T
    exposed, unexposed = n11 + n10, n01 + n00
    cases, noncases = n01 + n11, n00 + n10
    den = exposed * unexposed * cases * noncases
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = (n11 * n00 - n10 * n01) / np.sqrt(den)
    T = 1.0 - np.abs(phi)
    T[den == 0] = np.nan
    return T


def bootstrap_T(table: ContingencyTable, replicates: int, seed: int, levels=DEFAULT_LEVELS, *, n_jobs: int = 1) -> BootstrapResult:
    """Resample the table from Multinomial(n, observed cell probabilities).

    Replicate ``i`` uses its own stream derived from ``(seed, i)``, so the
    result does not depend on ``n_jobs``. Replicates that lose a margin are
    counted in ``n_degenerate`` and left out of ``samples`` and quantiles,
    as are replicates with |phi| = 1 (two empty cells, T = 0), which lie
    outside the open simplex where T is defined.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    seed = check_seed(seed)
    levels = tuple(float(q) for q in levels)
    if not all(0.0 < q < 1.0 for q in levels):
        raise ValueError("quantile levels must lie in (0, 1)")
    table.check_margins()
    point_T = float(thresholds_from_count_array(np.array([table.as_tuple()]))[0])
    probs = np.array(table.as_tuple(), dtype=float) / table.n

    if n_jobs == 1:
        counts = _draw_counts(table.n, probs, seed, 0, replicates)
    else:
        bounds = np.linspace(0, replicates, max(1, n_jobs) + 1).astype(int)
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            chunks = pool.map(
                lambda ab: _draw_counts(table.n, probs, seed, ab[0], ab[1]),
                zip(bounds[:-1], bounds[1:]),
            )
            counts = np.concatenate(list(chunks))

    T = thresholds_from_count_array(counts)
    good = T > 0  # also false for NaN
    n_degenerate = int(replicates - good.sum())
    if n_degenerate == replicates:
        raise AllDegenerate(f"all {replicates} bootstrap replicates are degenerate (n={table.n})")
    samples = np.sort(T[good])
    quantiles = {q: float(v) for q, v in zip(levels, np.quantile(samples, levels))}
    return BootstrapResult(point_T, replicates, seed, samples, quantiles, n_degenerate)
