"""Exponential growth curves and the stop-event search.

All four online solvers grow coordinates along

    x_j(delta) = (xbar_j + D_j) * exp(w_j * delta / c_j) - D_j

for a dual increment delta >= 0, where w_j is the coordinate's weight in the
active constraint (a row entry, or A_j applied to the separating direction).
An iteration ends at the first of a handful of monotone events: a coordinate
reaching its cap or its suggested value (closed form), or the constraint
value / objective crossing a threshold (bracketing plus bisection). Events
are resolved by a fixed priority when they coincide.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ExponentOverflow, NoProgress

EXP_GUARD = 700.0

# Resolution order for coinciding events. Cap beats advice because it changes
# the tight set; the objective check precedes the satisfied-by-two exit.
PRIORITY = ("cap", "advice", "objective", "target")


@dataclass
class StopEvent:
    kind: str            # "cap" | "advice" | "objective" | "target"
    j: int | None        # position in the support arrays (None for scalars)
    delta: float         # dual increment at which the event fires


def growth_value(b_j: float, d_j: float, load_j: float, a_ij: float,
                 c_j: float, y: float) -> float:
    """Value of one coordinate, x_j(y) = B_j exp((load_j + a_ij y)/c_j) - D_j."""
    e = (load_j + a_ij * y) / c_j
    if e > EXP_GUARD:
        raise ExponentOverflow(f"growth exponent {e:.1f} exceeds guard")
    return b_j * np.exp(e) - d_j


def coefficient_vector(w, advice_vals, below, lam, advice_feasible,
                       capacity) -> np.ndarray:
    """Additive coefficients D_j over the free support of one constraint.

    With trusted-and-feasible advice the coordinate shares lam of the growth
    uniformly and (1 - lam) proportionally to the advice entries still above
    the current point; otherwise growth is uniform. Terms with a zero
    indicator are zero even when their normalizer vanishes.
    """
    w = np.asarray(w, dtype=float)
    n1 = float(w.sum())
    if n1 <= 0:
        raise NoProgress("constraint has no positive weight on free coordinates")
    if not advice_feasible:
        return np.full(w.shape, capacity / n1)
    d = np.full(w.shape, lam / n1)
    n2 = float(np.sum(w * advice_vals * below))
    if n2 > 0 and lam < 1.0:
        d = d + (1.0 - lam) * advice_vals * below / n2
    return d * capacity


def first_crossing(u, g, rhs, hi_bound, tol) -> float | None:
    """Least delta in [0, hi_bound] with sum(u * exp(g delta)) >= rhs.

    u >= 0 and g >= 0 make the left side nondecreasing; brackets by doubling,
    then bisects to a relative width of tol. Returns None when the crossing
    lies beyond hi_bound.
    """
    with np.errstate(over="ignore"):
        def f(delta):
            return float(np.dot(u, np.exp(g * delta))) - rhs

        if f(0.0) >= 0.0:
            return 0.0
        if not np.isfinite(hi_bound) or f(hi_bound) < 0.0:
            return None
        lo, hi = 0.0, min(1.0, hi_bound)
        while f(hi) < 0.0:
            lo, hi = hi, min(2.0 * hi, hi_bound)
        while hi - lo > tol * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if f(mid) >= 0.0:
                hi = mid
            else:
                lo = mid
    return hi


def find_stop(xbar, D, w, c, theta, alpha, obj_now, advice_target,
              capped: bool, tol: float) -> StopEvent:
    """First stop event for one growth iteration over the free support.

    xbar, D, w, c, advice_target are aligned arrays over the free support of
    the active constraint (advice_target is +inf where no advice event is
    armed). theta is the satisfied-by-two threshold for sum(w x), alpha the
    phase budget for the full objective, obj_now its current value, and
    capped arms x_j = 1 events.
    """
    xbar = np.asarray(xbar, dtype=float)
    D = np.asarray(D, dtype=float)
    w = np.asarray(w, dtype=float)
    c = np.asarray(c, dtype=float)
    k = xbar + D
    growing = (w > 0) & (k > 0)
    if not growing.any():
        raise NoProgress("all growth rates vanished on a violated constraint")
    g = np.where(c > 0, w / c, 0.0)
    exp_limit = EXP_GUARD / float(np.max(g[growing]))

    def closed_form(targets):
        armed = growing & np.isfinite(targets) & (xbar < targets)
        if not armed.any():
            return np.inf, None
        deltas = np.full(xbar.shape, np.inf)
        deltas[armed] = (c[armed] / w[armed]) * np.log(
            (targets[armed] + D[armed]) / k[armed])
        deltas = np.maximum(deltas, 0.0)
        jmin = int(np.argmin(deltas))
        return float(deltas[jmin]), jmin

    d_adv, j_adv = closed_form(np.asarray(advice_target, dtype=float))
    if capped:
        d_cap, j_cap = closed_form(np.full(xbar.shape, 1.0))
    else:
        d_cap, j_cap = np.inf, None

    bound = min(d_adv, d_cap, exp_limit)
    # Constraint value: sum(w x(delta)) = theta.
    d_tgt = first_crossing(w * k, g, theta + float(np.dot(w, D)), bound, tol)
    # Objective: obj_now + sum(c (x(delta) - xbar)) = alpha.
    rhs_o = alpha - obj_now + float(np.dot(c, xbar)) + float(np.dot(c, D))
    d_obj = first_crossing(c * k, g, rhs_o, bound, tol)

    candidates = {
        "cap": (d_cap, j_cap),
        "advice": (d_adv, j_adv),
        "objective": (np.inf if d_obj is None else d_obj, None),
        "target": (np.inf if d_tgt is None else d_tgt, None),
    }
    best = min(delta for delta, _ in candidates.values())
    if not np.isfinite(best):
        raise ExponentOverflow("no stop event within the exponent guard")
    tie = max(8.0 * tol * max(1.0, best), 1e-15)
    for kind in PRIORITY:
        delta, j = candidates[kind]
        if delta <= best + tie:
            return StopEvent(kind=kind, j=j, delta=float(delta))
    raise AssertionError("unreachable")


def advance(xbar, D, w, c, delta) -> np.ndarray:
    """Move every free coordinate along its growth curve by delta."""
    out = (xbar + D) * np.exp(w * delta / c) - D
    return np.maximum(out, xbar)
