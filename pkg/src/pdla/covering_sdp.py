"""Online covering SDP solver with untrusted suggestions.

A stream of monotonically growing symmetric targets B_1 <= B_2 <= ... arrives
online and the solver maintains x >= 0 with sum_j A_j x_j >= B_i in the PSD
order. Each violated round is reduced to covering rows through the least
eigenvector v of the residual: the implicit row has weights w_j = v' A_j v
and right side b = v' B_i v, and the same growth engine as the LP case runs
until the residual turns PSD. Every stop event returns to a fresh
eigendirection; budget doubling restarts the phase exactly as for LPs. The
boxed variant enforces x <= 1 through the same tight-set mechanism.

The matrix dual Y accumulates delta * v v' per growth step, giving the
scaled certificate A_j (x) Y <= c_j after dividing by the reported factor.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (NoFeasibleSolution, NonMonotoneB, NotConverged,
                     PhaseRestartLimit)
from .growth import advance, coefficient_vector, find_stop
from .instances import AdviceVector, CoveringSdpInstance, SolverParams
from .symmetric import frobenius, is_psd, min_eigpair

SNAP = 1e-12
OBJ_ENTRY_TOL = 1e-12
MAX_ITER_ROUND = 200_000


@dataclass
class SeparationResult:
    value: float          # least eigenvalue of sum_j A_j x_j - B_i
    vector: np.ndarray    # unit eigenvector v

    @property
    def direction(self) -> np.ndarray:
        """Rank-one test direction V = v v' with unit trace."""
        return np.outer(self.vector, self.vector)


@dataclass
class SdpPhase:
    index: int
    alpha: float
    x: np.ndarray
    Y: np.ndarray               # matrix dual, sum of delta * v v'
    ay: np.ndarray              # cached A_j (x) Y per coordinate
    z: np.ndarray               # packing discounts of tight coordinates
    tight: np.ndarray
    obj: float
    dual_obj: float             # sum over steps of (v' B v) delta - caps
    y: dict[int, float] = field(default_factory=dict)


@dataclass
class SdpStepReport:
    round_no: int
    stop_reason: str            # "already_satisfied" | "satisfied"
    iterations: int
    phases_entered: int
    residual_eig: float         # least eigenvalue at exit (>= -tol)
    y_round: float
    tight_added: list[int]


@dataclass
class SdpDualCertificate:
    Y: np.ndarray
    z: np.ndarray
    scale: float
    objective: float


@dataclass
class SdpSolverState:
    n: int
    d: int
    c: np.ndarray
    A: np.ndarray               # stacked (n, d, d)
    boxed: bool
    advice: AdviceVector | None
    params: SolverParams
    S_advice: np.ndarray | None
    phase: SdpPhase | None = None
    alpha_history: list[float] = field(default_factory=list)
    x_best: np.ndarray = None
    last_B: np.ndarray = None
    round_no: int = 0
    violations_seen: int = 0
    iterations: int = 0
    col_max: np.ndarray = None
    col_min: np.ndarray = None
    sparsity_seen: float = 0.0
    trace: list = field(default_factory=list)


def new_sdp_solver(inst: CoveringSdpInstance,
                   advice: AdviceVector | None = None,
                   params: SolverParams | None = None) -> SdpSolverState:
    params = params if params is not None else SolverParams()
    A = np.stack([np.asarray(m, dtype=float) for m in inst.A])
    state = SdpSolverState(
        n=inst.n, d=inst.d, c=np.asarray(inst.c, dtype=float), A=A,
        boxed=inst.boxed, advice=advice, params=params,
        S_advice=None if advice is None else np.tensordot(
            advice.x_prime, A, axes=1))
    state.x_best = np.zeros(inst.n)
    state.last_B = np.full((inst.d, inst.d), -np.inf)
    state.col_max = np.zeros(inst.n)
    state.col_min = np.full(inst.n, np.inf)
    return state


def _start_phase(state: SdpSolverState, alpha: float) -> None:
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
    state.phase = SdpPhase(index=index, alpha=alpha, x=x,
                           Y=np.zeros((state.d, state.d)),
                           ay=np.zeros(state.n), z=np.zeros(state.n),
                           tight=tight, obj=float(state.c @ x), dual_obj=0.0)


def _initial_alpha(state: SdpSolverState, B: np.ndarray) -> float:
    if state.params.initial_alpha is not None:
        return float(state.params.initial_alpha)
    traces = np.trace(state.A, axis1=1, axis2=2)
    ok = traces > 0
    if not ok.any():
        raise NoFeasibleSolution(
            "every coverage matrix has zero trace; nothing can grow")
    return float(np.min(state.c[ok] * np.trace(B) / traces[ok]))


def separation(state: SdpSolverState, B) -> SeparationResult | None:
    """Least eigenpair of the residual at the active phase point, or None
    when the round is already satisfied within tol_psd."""
    B = np.asarray(B, dtype=float)
    x = state.phase.x if state.phase is not None else np.zeros(state.n)
    resid = np.tensordot(x, state.A, axes=1) - B
    lam, v = min_eigpair(resid, tol_eig=state.params.tol_eig)
    bnorm = float(np.linalg.norm(B))
    if lam >= -state.params.tol_psd * max(1.0, bnorm):
        return None
    return SeparationResult(value=float(lam), vector=v)


def process_matrix(state: SdpSolverState, B) -> SdpStepReport:
    """Feed one target matrix; returns once the residual is PSD within tol.

    Raises NonMonotoneB when the stream decreases, NoFeasibleSolution when a
    residual direction admits no growth, and PhaseRestartLimit on runaway
    budget guesses.
    """
    B = np.asarray(B, dtype=float)
    if B.shape != (state.d, state.d):
        from .errors import DimensionMismatch
        raise DimensionMismatch(
            f"target is {B.shape}, expected {(state.d, state.d)}")
    if np.isfinite(state.last_B).all():
        if not is_psd(B - state.last_B, tol_psd=state.params.tol_psd):
            raise NonMonotoneB(
                f"round {state.round_no + 1} target decreased somewhere")
    state.last_B = B.copy()
    state.round_no += 1
    rnd = state.round_no

    if state.phase is None:
        if float(np.trace(B)) <= 0.0:
            # Zero target is covered by any x >= 0; the budget guess waits
            # for a round that actually needs mass.
            return SdpStepReport(round_no=rnd, stop_reason="already_satisfied",
                                 iterations=0, phases_entered=0,
                                 residual_eig=0.0, y_round=0.0, tight_added=[])
        _start_phase(state, _initial_alpha(state, B))

    adv = state.advice
    if adv is not None:
        branch_feasible = is_psd(state.S_advice - B,
                                 tol_psd=state.params.tol_psd)
    else:
        branch_feasible = False

    y_cur = 0.0
    iters = 0
    phases_entered = 0
    counted_violation = False
    tight_added: list[int] = []
    lam_exit = 0.0
    bnorm = float(np.linalg.norm(B))

    while True:
        if iters > MAX_ITER_ROUND:
            raise NotConverged(
                f"round {rnd} still violated after {MAX_ITER_ROUND} steps")
        ph = state.phase
        if state.boxed:
            hit = (ph.x >= 1.0 - SNAP) & ~ph.tight
            if hit.any():
                cols = np.nonzero(hit)[0]
                ph.obj += float(state.c[cols] @ (1.0 - ph.x[cols]))
                ph.x[cols] = 1.0
                ph.tight[cols] = True
                tight_added.extend(int(j) for j in cols)
        resid = np.tensordot(ph.x, state.A, axes=1) - B
        lam, v = min_eigpair(resid, tol_eig=state.params.tol_eig)
        if lam >= -state.params.tol_psd * max(1.0, bnorm):
            lam_exit = float(lam)
            break
        if ph.obj >= ph.alpha * (1.0 - OBJ_ENTRY_TOL):
            _start_phase(state, ph.alpha * 2.0)
            phases_entered += 1
            y_cur = 0.0
            continue
        if not counted_violation:
            state.violations_seen += 1
            counted_violation = True

        w_full = np.maximum(np.einsum("jkl,k,l->j", state.A, v, v), 0.0)
        b = float(v @ B @ v)
        if b <= 0.0:
            raise NotConverged(
                "separating direction has nonpositive target mass")
        pos = w_full > 0
        if pos.any():
            np.maximum.at(state.col_max, np.nonzero(pos)[0], w_full[pos] / b)
            np.minimum.at(state.col_min, np.nonzero(pos)[0], w_full[pos] / b)

        free = ~ph.tight
        w = w_full[free]
        tight_mass = float(w_full[~free].sum())
        if float(w.sum()) <= 0.0:
            raise NoFeasibleSolution(
                f"round {rnd}: a residual direction reaches only "
                f"{tight_mass:.6g} of {b:.6g} with every coordinate capped")
        capacity = b - tight_mass if state.boxed else b
        if state.boxed:
            state.sparsity_seen = max(state.sparsity_seen,
                                      float(w.sum()) / capacity)

        fidx = np.nonzero(free)[0]
        xb = ph.x[fidx]
        cf = state.c[fidx]
        if adv is not None:
            adv_f = adv.x_prime[fidx]
            below = (xb < adv_f).astype(float)
            lam_mix = adv.lam
        else:
            adv_f = np.zeros(fidx.size)
            below = np.zeros(fidx.size)
            lam_mix = 1.0
        D = coefficient_vector(w, adv_f, below, lam_mix, branch_feasible,
                               capacity)
        if not (((w > 0) & (xb + D > 0)).any()):
            # Suggestion-proportional sharing can stall when the suggestion
            # has no mass along this direction; fall back to uniform.
            D = coefficient_vector(w, adv_f, below, lam_mix, False, capacity)

        advice_target = np.where(below > 0, adv_f, np.inf)
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
        ph.Y += ev.delta * np.outer(v, v)
        ph.ay += w_full * ev.delta
        if state.boxed and tight_mass > 0.0:
            ph.z[~free] += w_full[~free] * ev.delta
        ph.dual_obj += b * ev.delta
        y_cur += ev.delta
        if state.params.trace:
            state.trace.append({
                "round": rnd, "phase": ph.index, "alpha": ph.alpha,
                "event": ev.kind,
                "j": None if ev.j is None else int(fidx[ev.j]),
                "delta": ev.delta, "obj": ph.obj, "residual": lam,
            })
        if ev.kind == "objective":
            # Budget hit: double and reprocess against a fresh direction.
            _start_phase(state, ph.alpha * 2.0)
            phases_entered += 1
            y_cur = 0.0
        # Every event returns to the loop head for a fresh eigendirection.

    ph = state.phase
    ph.y[rnd] = y_cur
    np.maximum(state.x_best, ph.x, out=state.x_best)
    reason = "already_satisfied" if iters == 0 and phases_entered == 0 \
        else "satisfied"
    return SdpStepReport(round_no=rnd, stop_reason=reason, iterations=iters,
                         phases_entered=phases_entered, residual_eig=lam_exit,
                         y_round=y_cur, tight_added=tight_added)


def current_solution(state: SdpSolverState) -> np.ndarray:
    return state.x_best.copy()


def feasibility_gap(state: SdpSolverState, B) -> float:
    """Least eigenvalue of sum_j A_j xhat_j - B at the published solution."""
    resid = np.tensordot(state.x_best, state.A, axes=1) - np.asarray(B, float)
    lam, _ = min_eigpair(resid, tol_eig=state.params.tol_eig)
    return float(lam)


def dual_certificate(state: SdpSolverState) -> SdpDualCertificate:
    """Matrix dual of the active phase with its feasibility-restoring scale.

    Y is PSD by construction; dividing by scale gives A_j (x) Y - z_j <= c_j
    for every coordinate. objective is the accumulated sum of (v' B v) delta
    minus the tight-coordinate discounts, before scaling.
    """
    if state.phase is None:
        return SdpDualCertificate(Y=np.zeros((state.d, state.d)),
                                  z=np.zeros(state.n), scale=0.0,
                                  objective=0.0)
    ph = state.phase
    scale = max(float(np.max((ph.ay - ph.z) / state.c)), 0.0)
    return SdpDualCertificate(Y=ph.Y.copy(), z=ph.z.copy(), scale=scale,
                              objective=float(ph.dual_obj - ph.z.sum()))


def run_sdp(inst: CoveringSdpInstance, advice: AdviceVector | None = None,
            params: SolverParams | None = None):
    """Convenience: stream every target of an instance, return (state, reports)."""
    state = new_sdp_solver(inst, advice=advice, params=params)
    reports = [process_matrix(state, B) for B in inst.B_stream]
    return state, reports


def kappa_seen(state: SdpSolverState) -> float:
    seen = state.col_max > 0
    if not seen.any():
        return 1.0
    return float(np.max(state.col_max[seen] / state.col_min[seen]))


def beta_seen(state: SdpSolverState) -> float:
    seen = state.col_max > 0
    if not seen.any():
        return 0.0
    return float(np.max(state.col_max[seen] / state.c[seen]))
