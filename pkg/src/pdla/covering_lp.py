"""Online covering LP solver with untrusted fractional suggestions.

Rows of A x >= 1 arrive one at a time. The solver keeps a guessed budget
alpha for the optimum, grows coordinates continuously against each violated
row, and restarts with a doubled budget whenever the running objective
catches up with the guess. A fractional suggestion x' steers the growth:
a lam share of every multiplicative step is distributed uniformly and the
rest proportionally to suggestion entries not yet reached. The published
solution is the coordinatewise maximum over all phases, so it only grows.

The boxed variant additionally enforces x <= 1 via a tight set: coordinates
that reach their cap stop moving and instead accrue packing duals z that
discount the dual objective.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoFeasibleSolution, NoProgress, NotConverged, PhaseRestartLimit
from .growth import (EXP_GUARD, StopEvent, advance, coefficient_vector,
                     find_stop, growth_value)
from .instances import (AdviceVector, ConstraintSource, CoveringLpInstance,
                        SolverParams, validate_row)

SNAP = 1e-12            # proximity at which a boxed coordinate counts as tight
ADVICE_ROW_TOL = 1e-9   # slack when testing a row against the suggestion
OBJ_ENTRY_TOL = 1e-12   # relative slack for the budget check at iteration entry
MAX_ROUNDS = 1_000_000  # safety stop for oracle-driven runs


@dataclass
class LpPhase:
    index: int                  # 1-based position in the restart sequence
    alpha: float
    x: np.ndarray
    load: np.ndarray            # per-column folded dual mass, sum_k a_kj y_k
    y: dict[int, float]         # round -> dual raised within this phase
    z: np.ndarray               # packing duals of tight coordinates (boxed)
    tight: np.ndarray           # bool mask, x_j == 1
    obj: float                  # c . x, maintained incrementally


@dataclass
class StepReport:
    round_no: int
    stop_reason: str            # "already_satisfied" | "satisfied_by_2"
    iterations: int
    phases_entered: int
    row_value: float
    y_round: float
    tight_added: list[int]


@dataclass
class IterationCoeffs:
    """Dense inspection surface for one growth iteration.

    B is the multiplicative form of the curve: x_j(y) = B_j e^{...} - D_j
    matches the incremental form used internally at the current point.
    """
    D: np.ndarray
    B: np.ndarray
    x_bar: np.ndarray
    below_advice: np.ndarray


@dataclass
class DualCertificate:
    y: dict[int, float]
    z: np.ndarray
    scale: float                # divide duals by this to restore feasibility
    objective: float            # sum(y) - sum(z), before scaling


@dataclass
class LpSolverState:
    n: int
    c: np.ndarray
    boxed: bool
    advice: AdviceVector | None
    params: SolverParams
    phase: LpPhase | None = None
    alpha_history: list[float] = field(default_factory=list)
    x_best: np.ndarray = None
    round_no: int = 0
    violations_seen: int = 0
    iterations: int = 0
    col_max: np.ndarray = None
    col_min: np.ndarray = None
    sparsity_seen: float = 0.0
    trace: list = field(default_factory=list)


def new_lp_solver(n, costs, advice: AdviceVector | None = None,
                  params: SolverParams | None = None,
                  boxed: bool = False) -> LpSolverState:
    params = params if params is not None else SolverParams()
    c = np.asarray(costs, dtype=float)
    if c.shape != (n,) or not np.all(np.isfinite(c)) or np.any(c <= 0):
        from .errors import NonPositiveCost
        raise NonPositiveCost("costs must be finite and strictly positive")
    if advice is not None and advice.x_prime.shape != (n,):
        from .errors import LengthMismatch
        raise LengthMismatch("advice length does not match n")
    state = LpSolverState(n=n, c=c, boxed=boxed, advice=advice, params=params)
    state.x_best = np.zeros(n)
    state.col_max = np.zeros(n)
    state.col_min = np.full(n, np.inf)
    return state


def solver_for_instance(inst: CoveringLpInstance,
                        advice: AdviceVector | None = None,
                        params: SolverParams | None = None) -> LpSolverState:
    return new_lp_solver(inst.n, inst.c, advice=advice, params=params,
                         boxed=inst.boxed)


def _start_phase(state: LpSolverState, alpha: float) -> None:
    if state.phase is not None:
        np.maximum(state.x_best, state.phase.x, out=state.x_best)
    index = len(state.alpha_history) + 1
    if index > state.params.max_phase:
        raise PhaseRestartLimit(
            f"exceeded {state.params.max_phase} phase restarts")
    state.alpha_history.append(alpha)
    x = alpha / (2.0 * state.n * state.c)
    if state.advice is not None:
        x = np.minimum(state.advice.x_prime, x)
    if state.boxed:
        x = np.minimum(x, 1.0)
    tight = (x >= 1.0 - SNAP) if state.boxed else np.zeros(state.n, dtype=bool)
    x = np.where(tight, 1.0, x)
    state.phase = LpPhase(index=index, alpha=alpha, x=x,
                          load=np.zeros(state.n), y={},
                          z=np.zeros(state.n), tight=tight,
                          obj=float(state.c @ x))


def _initial_alpha(state: LpSolverState, idx, vals) -> float:
    if state.params.initial_alpha is not None:
        return float(state.params.initial_alpha)
    return float(np.min(state.c[idx] / vals))


def process_row(state: LpSolverState, row) -> StepReport:
    """Feed one covering row; returns once the row is satisfied.

    Raises NoFeasibleSolution when a boxed row cannot reach 1 even with every
    supported coordinate at its cap, and PhaseRestartLimit / ExponentOverflow
    on runaway guesses.
    """
    row = validate_row(row, state.n)
    idx = np.fromiter((j for j, _ in row), dtype=np.int64, count=len(row))
    vals = np.fromiter((a for _, a in row), dtype=float, count=len(row))
    state.round_no += 1
    rnd = state.round_no
    np.maximum.at(state.col_max, idx, vals)
    np.minimum.at(state.col_min, idx, vals)
    if state.phase is None:
        _start_phase(state, _initial_alpha(state, idx, vals))

    adv = state.advice
    if adv is not None:
        adv_row = float(vals @ adv.x_prime[idx])
        branch_feasible = adv_row >= 1.0 - ADVICE_ROW_TOL
    else:
        branch_feasible = False

    y_cur = 0.0
    iters = 0
    phases_entered = 0
    counted_violation = False
    tight_added: list[int] = []
    last_event = None

    while True:
        ph = state.phase
        if state.boxed:
            hit = (ph.x[idx] >= 1.0 - SNAP) & ~ph.tight[idx]
            if hit.any():
                cols = idx[hit]
                ph.obj += float(state.c[cols] @ (1.0 - ph.x[cols]))
                ph.x[cols] = 1.0
                ph.tight[cols] = True
                tight_added.extend(int(j) for j in cols)
        value = float(vals @ ph.x[idx])
        if value >= 1.0 - state.params.tol_feas:
            break
        if ph.obj >= ph.alpha * (1.0 - OBJ_ENTRY_TOL):
            _start_phase(state, ph.alpha * 2.0)
            phases_entered += 1
            y_cur = 0.0
            continue
        if not counted_violation:
            state.violations_seen += 1
            counted_violation = True

        free = ~ph.tight[idx]
        fidx = idx[free]
        w = vals[free]
        tight_mass = float(vals[~free].sum())
        if fidx.size == 0 or w.sum() <= 0.0:
            raise NoFeasibleSolution(
                f"row {rnd} sums to {float(vals.sum()):.6g} < 1 with every "
                "supported coordinate at its cap")
        capacity = 1.0 - tight_mass
        if state.boxed:
            state.sparsity_seen = max(state.sparsity_seen,
                                      float(w.sum()) / capacity)

        xb = ph.x[fidx]
        cf = state.c[fidx]
        if adv is not None:
            adv_f = adv.x_prime[fidx]
            below = (xb < adv_f).astype(float)
            lam = adv.lam
        else:
            adv_f = np.zeros(fidx.size)
            below = np.zeros(fidx.size)
            lam = 1.0
        D = coefficient_vector(w, adv_f, below, lam, branch_feasible, capacity)
        if branch_feasible and not (((w > 0) & (xb + D > 0)).any()):
            D = coefficient_vector(w, adv_f, below, lam, False, capacity)

        armed = (adv is not None) and below.any()
        advice_target = np.where(below > 0, adv_f, np.inf) if armed \
            else np.full(fidx.size, np.inf)
        ev = find_stop(xb, D, w, cf, 2.0 * capacity, ph.alpha, ph.obj,
                       advice_target, state.boxed, state.params.tol_bisect)
        iters += 1
        state.iterations += 1
        x_new = advance(xb, D, w, cf, ev.delta)
        if ev.kind == "advice":
            x_new[ev.j] = adv_f[ev.j]
        elif ev.kind == "cap":
            x_new[ev.j] = 1.0
        ph.obj += float(cf @ (x_new - xb))
        ph.x[fidx] = x_new
        y_cur += ev.delta
        if state.boxed and tight_mass > 0.0:
            ph.z[idx[~free]] += vals[~free] * ev.delta
        last_event = ev.kind
        if state.params.trace:
            state.trace.append({
                "round": rnd, "phase": ph.index, "alpha": ph.alpha,
                "event": ev.kind, "j": None if ev.j is None else int(fidx[ev.j]),
                "delta": ev.delta, "obj": ph.obj,
            })
        if ev.kind == "objective":
            # Budget hit: double the guess and reprocess this row, even when
            # the row value crossed 1 at the same instant. Advice and cap
            # events outrank the budget in ties, so trusted snaps never
            # trigger a spurious restart.
            _start_phase(state, ph.alpha * 2.0)
            phases_entered += 1
            y_cur = 0.0

    ph = state.phase
    ph.y[rnd] = y_cur
    ph.load[idx] += vals * y_cur
    np.maximum(state.x_best, ph.x, out=state.x_best)
    reason = "satisfied_by_2" if last_event == "target" else "already_satisfied"
    return StepReport(round_no=rnd, stop_reason=reason, iterations=iters,
                      phases_entered=phases_entered, row_value=value,
                      y_round=y_cur, tight_added=tight_added)


def current_solution(state: LpSolverState) -> np.ndarray:
    """Published solution: coordinatewise maximum over all phases so far."""
    return state.x_best.copy()


def dual_certificate(state: LpSolverState) -> DualCertificate:
    """Duals of the active phase plus the factor restoring dual feasibility.

    Dividing every y (and z) by scale yields A^T y <= c (minus z when boxed);
    the unscaled objective sum(y) - sum(z) is reported alongside.
    """
    if state.phase is None:
        return DualCertificate(y={}, z=np.zeros(state.n), scale=0.0,
                               objective=0.0)
    ph = state.phase
    scale = float(np.max((ph.load - ph.z) / state.c)) if state.n else 0.0
    scale = max(scale, 0.0)
    objective = float(sum(ph.y.values()) - ph.z.sum())
    return DualCertificate(y=dict(ph.y), z=ph.z.copy(), scale=scale,
                           objective=objective)


def compute_coeffs(state: LpSolverState, row, y: float) -> IterationCoeffs:
    """Dense growth coefficients for one iteration against `row`.

    Mirrors the internal support-compressed computation: D comes from the
    same sharing rule, and B re-expresses the curve multiplicatively at the
    in-row dual y (load folded from earlier rounds plus a_ij * y).
    """
    row = validate_row(row, state.n)
    if state.phase is None:
        raise NoProgress("no active phase; feed a row first")
    ph = state.phase
    idx = np.array([j for j, _ in row], dtype=np.int64)
    vals = np.array([a for _, a in row], dtype=float)
    a_dense = np.zeros(state.n)
    a_dense[idx] = vals
    free = ~ph.tight
    w_dense = np.where(free, a_dense, 0.0)
    adv = state.advice
    if adv is not None:
        below_dense = (ph.x < adv.x_prime).astype(float)
        adv_dense = adv.x_prime
        lam = adv.lam
        branch = float(vals @ adv.x_prime[idx]) >= 1.0 - ADVICE_ROW_TOL
    else:
        below_dense = np.zeros(state.n)
        adv_dense = np.zeros(state.n)
        lam = 1.0
        branch = False
    capacity = 1.0 - float(a_dense[ph.tight].sum()) if state.boxed else 1.0
    n1 = float(w_dense.sum())
    if n1 <= 0:
        raise NoProgress("row has no weight on free coordinates")
    if branch:
        D = np.full(state.n, lam / n1)
        n2 = float(np.sum(w_dense * adv_dense * below_dense))
        if n2 > 0 and lam < 1.0:
            D = D + (1.0 - lam) * adv_dense * below_dense / n2
        D = D * capacity
    else:
        D = np.full(state.n, capacity / n1)
    expo = (ph.load + a_dense * y - ph.z) / state.c
    if np.any(expo > EXP_GUARD):
        from .errors import ExponentOverflow
        raise ExponentOverflow("coefficient exponent exceeds guard")
    # B pins the multiplicative form to the current point: x_bar = B e^expo - D.
    B = (ph.x + D) / np.exp(expo)
    return IterationCoeffs(D=D, B=B, x_bar=ph.x.copy(),
                           below_advice=below_dense.astype(bool))


def find_stop_event(state: LpSolverState, row, coeffs: IterationCoeffs) -> StopEvent:
    """First stop event implied by `coeffs` for this row, from the current point."""
    row = validate_row(row, state.n)
    ph = state.phase
    idx = np.array([j for j, _ in row], dtype=np.int64)
    vals = np.array([a for _, a in row], dtype=float)
    free = ~ph.tight[idx]
    fidx = idx[free]
    w = vals[free]
    capacity = 1.0 - float(vals[~free].sum()) if state.boxed else 1.0
    adv = state.advice
    if adv is not None:
        below = coeffs.below_advice[fidx]
        advice_target = np.where(below, adv.x_prime[fidx], np.inf)
    else:
        advice_target = np.full(fidx.size, np.inf)
    ev = find_stop(coeffs.x_bar[fidx], coeffs.D[fidx], w, state.c[fidx],
                   2.0 * capacity, ph.alpha, ph.obj, advice_target,
                   state.boxed, state.params.tol_bisect)
    if ev.j is not None:
        ev = StopEvent(kind=ev.kind, j=int(fidx[ev.j]), delta=ev.delta)
    return ev


def run_source(state: LpSolverState, source: ConstraintSource) -> list[StepReport]:
    """Drive the solver from a fixed row list or a separation oracle.

    Oracle mode calls source.oracle(published_x) and stops at None. With
    params.debug each produced row is re-checked to be genuinely violated.
    """
    reports = []
    if source.rows is not None:
        for row in source.rows:
            reports.append(process_row(state, row))
        return reports
    for _ in range(MAX_ROUNDS):
        x = current_solution(state)
        row = source.oracle(x)
        if row is None:
            return reports
        if state.params.debug:
            checked = validate_row(row, state.n)
            val = sum(a * x[j] for j, a in checked)
            if val >= 1.0:
                raise NoProgress(
                    f"oracle produced a satisfied row (value {val:.6g})")
        reports.append(process_row(state, row))
    raise NotConverged(f"oracle still separating after {MAX_ROUNDS} rounds")


def run_lp(inst: CoveringLpInstance, advice: AdviceVector | None = None,
           params: SolverParams | None = None):
    """Convenience: run the full row list of an instance, return (state, reports)."""
    state = solver_for_instance(inst, advice=advice, params=params)
    reports = [process_row(state, row) for row in inst.rows]
    return state, reports


def kappa_seen(state: LpSolverState) -> float:
    """Largest within-column spread max_j a^max_j / a^min_j over revealed rows."""
    seen = state.col_max > 0
    if not seen.any():
        return 1.0
    return float(np.max(state.col_max[seen] / state.col_min[seen]))


def beta_seen(state: LpSolverState) -> float:
    """Largest entry-to-cost ratio max_j a^max_j / c_j over revealed rows."""
    seen = state.col_max > 0
    if not seen.any():
        return 0.0
    return float(np.max(state.col_max[seen] / state.c[seen]))
