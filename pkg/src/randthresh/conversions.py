"""Closed-form maps between association measures at fixed prevalences.

These are unchecked formulas; the public, validated entry points live in
:mod:`randthresh.threshold`.
"""

import math


def or_to_rr_raw(pe, pd, odds_ratio):
    """Positive root of pe*u**2 + a*u + c = 0, the one with u = 1 at OR = 1."""
    a = pd * (odds_ratio - 1.0) + (1.0 - pe) - pe * odds_ratio
    c = (pe - 1.0) * odds_ratio
    disc = math.sqrt(a * a + 4.0 * pe * (1.0 - pe) * odds_ratio)
    if a <= 0.0:
        return (-a + disc) / (2.0 * pe)
    # same root, without cancelling -a against disc
    return 2.0 * c / (-a - disc)


def or_quadratic_residual(pe, pd, odds_ratio, u):
    a = pd * (odds_ratio - 1.0) + (1.0 - pe) - pe * odds_ratio
    c = (pe - 1.0) * odds_ratio
    return pe * u * u + a * u + c


def rr_to_or_raw(pe, pd, rr):
    q = pd / (1.0 + pe * (rr - 1.0))  # P(d=1 | e=0)
    return rr * (1.0 - q) / (1.0 - rr * q)


def rd_from_rr(pe, pd, rr):
    return pd * (rr - 1.0) / (1.0 + pe * (rr - 1.0))


def sd_ratio(pe, pd):
    """k = sqrt(pe(1-pe) / (pd(1-pd)))."""
    return math.sqrt(pe * (1.0 - pe) / (pd * (1.0 - pd)))
