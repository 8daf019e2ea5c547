"""Finitely supported propensity-risk distributions on the open unit square.

A distribution is *feasible* for a table when its expected cells
E[(1-p)r], E[pr], E[(1-p)(1-r)], E[p(1-r)] reproduce the observed ones.
Every feasible distribution has R^2 >= |phi|, and the two-point
distribution built by :func:`optimal_two_point` attains it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit, logit

from ._validation import EPS_BOUNDARY, check_seed
from .errors import ConstructionFailed, DegenerateMarginal, GenerationFailed, NotFeasible
from .table import CellProbabilities, covariance_ed, phi

FEASIBLE_TOL = 1e-12
ORACLE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DiscreteLatentDistribution:
    """Atoms ``(p[i], r[i])`` with weights ``w[i]``."""

    p: np.ndarray
    r: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        p, r, w = (np.atleast_1d(np.asarray(a, dtype=float)).copy() for a in (self.p, self.r, self.w))
        if not (p.shape == r.shape == w.shape and p.ndim == 1 and p.size >= 1):
            raise ValueError("p, r and w must be 1-d arrays of equal, non-zero length")
        if not np.all((p > EPS_BOUNDARY) & (p < 1 - EPS_BOUNDARY) & (r > EPS_BOUNDARY) & (r < 1 - EPS_BOUNDARY)):
            raise ValueError("all atoms must lie strictly inside the open unit square")
        if not np.all(w > 0):
            raise ValueError("weights must be positive")
        if abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {math.fsum(w)!r}, not 1")
        for name, a in (("p", p), ("r", r), ("w", w)):
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    @classmethod
    def from_atoms(cls, atoms) -> DiscreteLatentDistribution:
        """Build from an iterable of ``(p, r, w)`` triples."""
        arr = np.asarray(list(atoms), dtype=float).reshape(-1, 3)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2])

    @property
    def atoms(self) -> list[tuple[float, float, float]]:
        return [(float(a), float(b), float(c)) for a, b, c in zip(self.p, self.r, self.w)]

    def __len__(self):
        return self.p.size


@dataclass(frozen=True)
class RandomnessSummary:
    mean_p: float
    mean_r: float
    var_p: float
    var_r: float
    cov_pr: float
    R2_p: float
    R2_r: float
    R2: float
    eta: float
    rho_pr: Optional[float]


@dataclass(frozen=True)
class TwoPointConstruction:
    theta1: float
    theta2: float
    k1: float
    k2: float
    sign: int

    def atoms(self, p_e, p_d):
        s = self.sign
        w1 = self.theta1 / (self.theta1 + self.theta2)
        return (
            (p_e + self.k1, p_d + s * self.k1, w1),
            (p_e - self.k2, p_d - s * self.k2, 1.0 - w1),
        )


def summarize(mu: DiscreteLatentDistribution) -> RandomnessSummary:
    w = mu.w
    mean_p = float(np.dot(w, mu.p))
    mean_r = float(np.dot(w, mu.r))
    for name, m in (("E[p]", mean_p), ("E[r]", mean_r)):
        if not (EPS_BOUNDARY < m < 1 - EPS_BOUNDARY):
            raise DegenerateMarginal(f"{name} = {m!r} is too close to 0 or 1")
    dp, dr = mu.p - mean_p, mu.r - mean_r
    var_p = float(np.dot(w, dp * dp))
    var_r = float(np.dot(w, dr * dr))
    cov = float(np.dot(w, dp * dr))
    r2_p = var_p / (mean_p * (1 - mean_p))
    r2_r = var_r / (mean_r * (1 - mean_r))
    r2 = math.sqrt(r2_p * r2_r)
    rho = cov / math.sqrt(var_p * var_r) if var_p > 0 and var_r > 0 else None
    return RandomnessSummary(mean_p, mean_r, var_p, var_r, cov, r2_p, r2_r, r2, 1.0 - r2, rho)


def expected_cells(mu: DiscreteLatentDistribution) -> np.ndarray:
    """Expected (p01, p11, p00, p10) under ``mu`` with no causal effect."""
    return _expected_cells(mu.p, mu.r, mu.w)


def _expected_cells(p, r, w):
    # works on (k,) atoms or (m, k) batches
    e_pr = np.sum(w * p * r, axis=-1)
    e_p = np.sum(w * p, axis=-1)
    e_r = np.sum(w * r, axis=-1)
    return np.stack([e_r - e_pr, e_pr, 1.0 - e_p - e_r + e_pr, e_p - e_pr], axis=-1)


def is_feasible(mu: DiscreteLatentDistribution, cells: CellProbabilities, tol: float = FEASIBLE_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return bool(np.max(np.abs(expected_cells(mu) - cells.as_array())) <= tol)


def optimal_two_point(cells: CellProbabilities):
    """Feasible distribution minimizing R^2, and the parameters that built it.

    Returns ``(construction, mu)``. For an independent table the two atoms
    coincide and ``mu`` is a single point mass at (p_e, p_d).
    """
    pe, pd = cells.p_e, cells.p_d
    sigma = covariance_ed(cells)
    sign = (sigma > 0) - (sigma < 0)
    theta1 = min(pe, 0.5 + sign * (pd - 0.5))
    theta2 = min(1.0 - pe, 0.5 + sign * (0.5 - pd))
    root = math.sqrt(abs(sigma))
    k1 = math.sqrt(theta2 / theta1) * root
    k2 = math.sqrt(theta1 / theta2) * root
    assert k1 < theta2 and k2 < theta1, "sigma_ed outside its realizable bounds"
    construction = TwoPointConstruction(theta1, theta2, k1, k2, sign)
    if sign == 0:
        return construction, DiscreteLatentDistribution([pe], [pd], [1.0])
    return construction, DiscreteLatentDistribution.from_atoms(construction.atoms(pe, pd))


def two_point_with_coefficients(cells: CellProbabilities, r2_p: float, r2_r: float | None = None):
    """Feasible two-point distribution with prescribed R^2_p and R^2_r.

    The targets must satisfy sqrt(R^2_p * R^2_r) = |phi|; ``r2_r`` defaults
    to phi^2 / r2_p. Atoms sit at (p_e + a*sqrt(t), p_d + s*b*sqrt(t)) and
    (p_e - a/sqrt(t), p_d - s*b/sqrt(t)) with weight 1/(1+t) on the first,
    where a^2 and b^2 are the target variances. The odds t are chosen inside
    the interval keeping both atoms in the open square; when that interval
    is empty this family has no witness and :class:`ConstructionFailed`
    is raised.
    """
    pe, pd = cells.p_e, cells.p_d
    sigma = covariance_ed(cells)
    f = abs(phi(cells))
    if sigma == 0.0:
        raise ConstructionFailed("independent table: the only witness is the point mass")
    if r2_r is None:
        r2_r = f * f / r2_p
    if not (0 < r2_p < 1 and 0 < r2_r < 1):
        raise ConstructionFailed(f"R2_p={r2_p!r}, R2_r={r2_r!r} must both lie in (0, 1)")
    if abs(math.sqrt(r2_p * r2_r) - f) > 1e-12 * max(1.0, f):
        raise ConstructionFailed("sqrt(R2_p * R2_r) must equal |phi|")
    var_p = r2_p * pe * (1 - pe)
    var_r = r2_r * pd * (1 - pd)
    sign = 1 if sigma > 0 else -1
    # each constraint bounds t from below or above
    lo = max(var_p / pe**2, var_r / (pd if sign > 0 else 1 - pd) ** 2)
    hi = min((1 - pe) ** 2 / var_p, (1 - pd if sign > 0 else pd) ** 2 / var_r)
    if not lo < hi:
        raise ConstructionFailed(
            f"no two-point witness with R2_p={r2_p:.6g}, R2_r={r2_r:.6g} for this table"
        )
    t = math.sqrt(lo * hi)
    st = math.sqrt(t)
    a, b = math.sqrt(var_p), math.sqrt(var_r)
    w1 = 1.0 / (1.0 + t)
    return DiscreteLatentDistribution(
        [pe + a * st, pe - a / st],
        [pd + sign * b * st, pd - sign * b / st],
        [w1, 1.0 - w1],
    )


def lower_bound_check(mu: DiscreteLatentDistribution, cells: CellProbabilities) -> float:
    """R^2(mu) - |phi|; nonnegative (up to rounding) for every feasible ``mu``."""
    if not is_feasible(mu, cells, ORACLE_TOL):
        raise NotFeasible("distribution does not reproduce the table within 1e-8")
    return summarize(mu).R2 - abs(phi(cells))


@dataclass(frozen=True)
class FeasibleBatch:
    """``size`` feasible distributions with ``n_atoms`` atoms each, as (size, n_atoms) arrays."""

    p: np.ndarray
    r: np.ndarray
    w: np.ndarray

    def __len__(self):
        return self.p.shape[0]

    def distribution(self, i) -> DiscreteLatentDistribution:
        return DiscreteLatentDistribution(self.p[i], self.r[i], self.w[i])

    def expected_cells(self) -> np.ndarray:
        return _expected_cells(self.p, self.r, self.w)

    def r2(self) -> np.ndarray:
        w = self.w
        mp = np.sum(w * self.p, axis=1, keepdims=True)
        mr = np.sum(w * self.r, axis=1, keepdims=True)
        vp = np.sum(w * (self.p - mp) ** 2, axis=1)
        vr = np.sum(w * (self.r - mr) ** 2, axis=1)
        mp, mr = mp[:, 0], mr[:, 0]
        return np.sqrt(vp * vr / (mp * (1 - mp) * mr * (1 - mr)))

    def cov_pr(self) -> np.ndarray:
        w = self.w
        mp = np.sum(w * self.p, axis=1, keepdims=True)
        mr = np.sum(w * self.r, axis=1, keepdims=True)
        return np.sum(w * (self.p - mp) * (self.r - mr), axis=1)


def _candidates(cells, n_atoms, size, rng, atoms=None):
    """Propose ``size`` distributions, solving the last atom from the moment constraints.

    The first ``n_atoms - 1`` atoms get unnormalized weights v; scaling them
    by s and solving for the last atom (p_n, r_n, w_n = 1 - s*sum(v)) under
    E[p] = p_e, E[r] = p_d, E[pr] = p11 reduces to a quadratic in s.
    """
    pe, pd, p11 = cells.p_e, cells.p_d, cells.p11
    sigma = covariance_ed(cells)
    m = n_atoms - 1
    if atoms is not None:
        fixed = np.asarray(atoms, dtype=float).reshape(m, 2)
        p = np.broadcast_to(fixed[:, 0], (size, m)).copy()
        r = np.broadcast_to(fixed[:, 1], (size, m)).copy()
    else:
        # half the proposals get correlation in (|phi|, 1), tilted toward 1, and
        # spread is log-uniform: strongly associated tables need atoms near corners
        f = abs(phi(cells))
        spread = np.exp(rng.uniform(np.log(0.05), np.log(8.0), size=(size, 1)))
        floor = np.where(rng.random((size, 1)) < 0.5, 0.0, f)
        rho = np.sign(sigma) * (1.0 - (1.0 - floor) * rng.random((size, 1)) ** 3)
        z1 = rng.standard_normal((size, m))
        z2 = rho * z1 + np.sqrt(1 - rho**2) * rng.standard_normal((size, m))
        p = expit(logit(pe) + spread * z1)
        r = expit(logit(pd) + spread * z2)
    v = rng.dirichlet(np.ones(m), size=size) if m > 1 else np.ones((size, 1))
    a1 = np.sum(v * p, axis=1)
    a2 = np.sum(v * r, axis=1)
    a3 = np.sum(v * p * r, axis=1)
    vsum = np.sum(v, axis=1)
    c2 = a1 * a2 - vsum * a3
    c1 = a3 + vsum * p11 - pe * a2 - pd * a1
    c0 = -sigma
    disc = c1 * c1 - 4 * c2 * c0
    real = disc >= 0
    sq = np.sqrt(np.where(real, disc, 0.0))
    flip = rng.random(size) < 0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        roots = []
        for sgn in (1.0, -1.0):
            quad = (-c1 + sgn * sq) / (2 * c2)
            lin = -c0 / c1
            roots.append(np.where(np.abs(c2) > 1e-300, quad, lin))
        results = []
        for s in roots:
            wn = 1.0 - s * vsum
            pn = (pe - s * a1) / wn
            rn = (pd - s * a2) / wn
            ok = (
                real & (s > 0) & (wn > EPS_BOUNDARY)
                & (pn > EPS_BOUNDARY) & (pn < 1 - EPS_BOUNDARY)
                & (rn > EPS_BOUNDARY) & (rn < 1 - EPS_BOUNDARY)
            )
            results.append((ok, s, wn, pn, rn))
    (ok_a, s_a, wn_a, pn_a, rn_a), (ok_b, s_b, wn_b, pn_b, rn_b) = results
    use_b = (~ok_a | (flip & ok_b)) & ok_b
    inside = np.all((p > EPS_BOUNDARY) & (p < 1 - EPS_BOUNDARY) & (r > EPS_BOUNDARY) & (r < 1 - EPS_BOUNDARY), axis=1)
    ok = (ok_a | ok_b) & inside
    s = np.where(use_b, s_b, s_a)
    wn = np.where(use_b, wn_b, wn_a)
    pn = np.where(use_b, pn_b, pn_a)
    rn = np.where(use_b, rn_b, rn_a)
    P = np.concatenate([p, pn[:, None]], axis=1)[ok]
    R = np.concatenate([r, rn[:, None]], axis=1)[ok]
    W = np.concatenate([s[:, None] * v, wn[:, None]], axis=1)[ok]
    return P, R, W


MAX_BATCH = 500_000


def sample_feasible(cells: CellProbabilities, n_atoms: int, size: int, rng, *, atoms=None, max_rounds: int = 200) -> FeasibleBatch:
    """Draw ``size`` random feasible distributions.

    Proposals whose atoms leave the open square, or which miss the table by
    more than ``FEASIBLE_TOL``, are discarded. Batches grow with the observed
    rejection rate; after ``max_rounds`` rounds :class:`GenerationFailed` is
    raised.
    """
    if n_atoms < 2:
        raise ValueError("n_atoms must be >= 2")
    if size < 1:
        raise ValueError("size must be >= 1")
    parts, have, proposed = [], 0, 0
    batch = max(64, 2 * size)
    target = cells.as_array()
    for _ in range(max_rounds):
        P, R, W = _candidates(cells, n_atoms, batch, rng, atoms)
        proposed += batch
        if len(P):
            W = W / W.sum(axis=1, keepdims=True)
            # a tiny last weight amplifies rounding in the solved atom
            err = np.max(np.abs(_expected_cells(P, R, W) - target), axis=1)
            keep = err <= FEASIBLE_TOL
            P, R, W = P[keep], R[keep], W[keep]
        if len(P):
            parts.append((P, R, W))
            have += len(P)
        if have >= size:
            break
        rate = max(have, 1) / proposed
        batch = int(min(MAX_BATCH, max(64, 1.5 * (size - have) / rate)))
    else:
        raise GenerationFailed(
            f"found {have} of {size} feasible distributions after {max_rounds} rounds"
        )
    P, R, W = (np.concatenate(x)[:size] for x in zip(*parts))
    return FeasibleBatch(P, R, W)


def random_feasible(cells: CellProbabilities, n_atoms: int, seed: int, *, atoms=None, max_rounds: int = 200) -> DiscreteLatentDistribution:
    """One random feasible distribution, deterministic given ``seed``.

    ``atoms`` optionally fixes the first ``n_atoms - 1`` (p, r) locations;
    only their weights and the final atom are then solved for.
    """
    rng = np.random.default_rng(check_seed(seed))
    return sample_feasible(cells, n_atoms, 1, rng, atoms=atoms, max_rounds=max_rounds).distribution(0)


@dataclass(frozen=True)
class OracleResult:
    abs_phi: float
    optimal_R2: float
    optimal_feasibility_error: float
    samples: int
    min_sampled_R2: float
    max_feasibility_error: float

    @property
    def gap(self) -> float:
        return self.min_sampled_R2 - self.abs_phi


def optimality_oracle(cells: CellProbabilities, samples: int = 10_000, n_atoms=(2, 3, 4, 5), seed: int = 0) -> OracleResult:
    """Random search over feasible distributions versus the two-point optimum."""
    rng = np.random.default_rng(check_seed(seed))
    _, mu_star = optimal_two_point(cells)
    star_err = float(np.max(np.abs(expected_cells(mu_star) - cells.as_array())))
    counts = np.full(len(n_atoms), samples // len(n_atoms))
    counts[: samples % len(n_atoms)] += 1
    min_r2, max_err = math.inf, 0.0
    target = cells.as_array()
    for k, c in zip(n_atoms, counts):
        if c == 0:
            continue
        batch = sample_feasible(cells, int(k), int(c), rng)
        min_r2 = min(min_r2, float(batch.r2().min()))
        max_err = max(max_err, float(np.max(np.abs(batch.expected_cells() - target))))
    return OracleResult(abs(phi(cells)), summarize(mu_star).R2, star_err, int(samples), min_r2, max_err)
