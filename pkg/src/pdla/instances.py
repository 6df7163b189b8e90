"""Problem instances, advice vectors, constraint sources and solver knobs.

External formats are JSON with numbers as decimal text, so parse followed by
serialize is the identity on the parsed values (floats round-trip exactly).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    AdviceAboveCap,
    AsymmetricMatrix,
    EmptyRow,
    LambdaOutOfRange,
    LengthMismatch,
    MalformedDocument,
    NegativeAdvice,
    NegativeEntry,
    NonMonotoneB,
    NonPositiveCost,
    NotPsd,
)

SparseRow = list[tuple[int, float]]


@dataclass
class SolverParams:
    """Numeric tolerances and safety caps shared by all solvers."""

    tol_bisect: float = 1e-9   # relative tolerance of the event search
    tol_feas: float = 1e-7     # a row counts as satisfied at value >= 1 - tol_feas
    tol_psd: float = 1e-7      # relative PSD slack for separation / validation
    tol_sym: float = 1e-8      # relative symmetry slack
    tol_eig: float = 1e-10     # Jacobi off-diagonal target
    max_phase: int = 200       # hard cap on guess-and-double restarts
    seed: int = 0
    debug: bool = False        # extra invariant checks (oracle rows, PSD duals)
    initial_alpha: float | None = None  # override the first cost estimate (diagnostics)
    trace: bool = False        # collect per-round step reports on the state

    def __post_init__(self):
        for name in ("tol_bisect", "tol_feas", "tol_psd", "tol_sym", "tol_eig"):
            if getattr(self, name) <= 0:
                raise MalformedDocument(f"{name} must be positive")
        if self.max_phase < 1:
            raise MalformedDocument("max_phase must be >= 1")


@dataclass
class CoveringLpInstance:
    """min c.x subject to A x >= 1, x >= 0 (and x <= 1 when boxed).

    Rows are sparse (column, value) pairs in arrival order; they may be empty
    when constraints come from a separation oracle instead. Treat instances
    as immutable once built: solver states share the arrays.
    """

    n: int
    c: np.ndarray
    rows: list[SparseRow]
    boxed: bool = False

    def row_arrays(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        idx, vals = zip(*self.rows[i])
        return np.asarray(idx, dtype=np.int64), np.asarray(vals, dtype=float)


@dataclass
class CoveringSdpInstance:
    """min c.x subject to sum_j A_j x_j >= B_i (PSD order), 0 <= x (<= 1 boxed).

    The targets B_i arrive as a monotone stream of PSD matrices.
    """

    n: int
    d: int
    c: np.ndarray
    A: list[np.ndarray]
    B_stream: list[np.ndarray]
    boxed: bool = False


@dataclass
class AdviceVector:
    """A suggested solution plus a confidence dial.

    lam = 0 trusts the suggestion fully, lam = 1 ignores it. The suggestion
    is never required to be feasible.
    """

    x_prime: np.ndarray
    lam: float


@dataclass
class ConstraintSource:
    """Either a fixed row list or a separation callback x -> violated row."""

    rows: list[SparseRow] | None = None
    oracle: Callable[[np.ndarray], SparseRow | None] | None = None

    def __post_init__(self):
        if (self.rows is None) == (self.oracle is None):
            raise MalformedDocument("provide exactly one of rows or oracle")


# --- validation helpers -------------------------------------------------------


def _as_cost_vector(raw, n: int) -> np.ndarray:
    c = np.asarray(raw, dtype=float)
    if c.shape != (n,):
        raise LengthMismatch(f"cost vector has shape {c.shape}, expected ({n},)")
    if not np.all(np.isfinite(c)):
        raise MalformedDocument("costs must be finite")
    if np.any(c <= 0):
        raise NonPositiveCost("all costs must be strictly positive")
    return c


def validate_row(row: Sequence, n: int) -> SparseRow:
    """Check one sparse row: indices in range, no duplicates, a positive entry."""
    clean: SparseRow = []
    seen = set()
    for pair in row:
        try:
            j, v = pair
            j = int(j)
            v = float(v)
        except (TypeError, ValueError) as exc:
            raise MalformedDocument(f"bad row entry {pair!r}") from exc
        if not 0 <= j < n:
            raise MalformedDocument(f"column {j} out of range for n={n}")
        if j in seen:
            raise MalformedDocument(f"duplicate column {j} in row")
        if not np.isfinite(v):
            raise MalformedDocument("row entries must be finite")
        if v < 0:
            raise NegativeEntry(f"negative coefficient {v} at column {j}")
        seen.add(j)
        clean.append((j, v))
    if not any(v > 0 for _, v in clean):
        raise EmptyRow("row has no positive entry and can never be covered")
    return clean


def make_lp_instance(n, c, rows, boxed=False) -> CoveringLpInstance:
    if not isinstance(n, int) or n < 1:
        raise MalformedDocument("n must be a positive integer")
    cv = _as_cost_vector(c, n)
    clean_rows = [validate_row(r, n) for r in rows]
    return CoveringLpInstance(n=n, c=cv, rows=clean_rows, boxed=bool(boxed))


def parse_lp_instance(text: str) -> CoveringLpInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocument("top level must be an object")
    try:
        n = doc["n"]
        c = doc["c"]
        rows = doc["rows"]
        boxed = doc.get("boxed", False)
    except KeyError as exc:
        raise MalformedDocument(f"missing field {exc}") from exc
    if not isinstance(boxed, bool):
        raise MalformedDocument("boxed must be a boolean")
    if not isinstance(rows, list):
        raise MalformedDocument("rows must be a list")
    return make_lp_instance(n, c, rows, boxed)


def serialize_lp_instance(inst: CoveringLpInstance) -> str:
    doc = {
        "n": inst.n,
        "c": [float(v) for v in inst.c],
        "boxed": inst.boxed,
        "rows": [[[j, float(v)] for j, v in row] for row in inst.rows],
    }
    return json.dumps(doc)


def normalize_box_bounds(n, c, rows, u):
    """Rescale a box-constrained instance with general upper bounds u to u = 1.

    Column j is substituted x_j = u_j * t_j, so costs become c_j * u_j and row
    entries a_ij * u_j. Returns the normalized instance plus u for de-scaling
    solutions. The JSON format only carries normalized instances.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (n,):
        raise LengthMismatch("u has wrong length")
    if np.any(u <= 0) or not np.all(np.isfinite(u)):
        raise MalformedDocument("upper bounds must be positive and finite")
    scaled_rows = [[(j, v * u[j]) for j, v in row] for row in rows]
    scaled_c = np.asarray(c, dtype=float) * u
    return make_lp_instance(n, scaled_c, scaled_rows, boxed=True), u


# --- SDP ---------------------------------------------------------------------


def _as_sym_matrix(raw, d: int, tol_sym: float, what: str) -> np.ndarray:
    m = np.asarray(raw, dtype=float)
    if m.size != d * d:
        raise LengthMismatch(f"{what} has {m.size} entries, expected {d * d}")
    m = m.reshape(d, d)
    if not np.all(np.isfinite(m)):
        raise MalformedDocument(f"{what} must be finite")
    scale = max(1.0, float(np.linalg.norm(m)))
    if np.max(np.abs(m - m.T)) > tol_sym * scale:
        raise AsymmetricMatrix(f"{what} is not symmetric within tolerance")
    return 0.5 * (m + m.T)


def _check_psd(m: np.ndarray, tol_psd: float, what: str) -> None:
    scale = max(1.0, float(np.linalg.norm(m)))
    lam_min = float(np.linalg.eigvalsh(m)[0])
    if lam_min < -tol_psd * scale:
        raise NotPsd(f"{what} has eigenvalue {lam_min}")


def make_sdp_instance(n, d, c, A, B_stream, boxed=False,
                      tol_sym=1e-8, tol_psd=1e-7) -> CoveringSdpInstance:
    if not isinstance(n, int) or n < 1 or not isinstance(d, int) or d < 1:
        raise MalformedDocument("n and d must be positive integers")
    cv = _as_cost_vector(c, n)
    if len(A) != n:
        raise LengthMismatch(f"got {len(A)} action matrices, expected {n}")
    mats = []
    for j, raw in enumerate(A):
        m = _as_sym_matrix(raw, d, tol_sym, f"A[{j}]")
        _check_psd(m, tol_psd, f"A[{j}]")
        mats.append(m)
    if len(B_stream) < 1:
        raise MalformedDocument("B stream must be nonempty")
    targets = []
    prev = np.zeros((d, d))
    for i, raw in enumerate(B_stream):
        b = _as_sym_matrix(raw, d, tol_sym, f"B[{i}]")
        _check_psd(b, tol_psd, f"B[{i}]")
        diff = b - prev
        scale = max(1.0, float(np.linalg.norm(b)))
        if float(np.linalg.eigvalsh(diff)[0]) < -tol_psd * scale:
            raise NonMonotoneB(f"B[{i}] is not >= B[{i - 1}]")
        targets.append(b)
        prev = b
    return CoveringSdpInstance(n=n, d=d, c=cv, A=mats, B_stream=targets,
                               boxed=bool(boxed))


def parse_sdp_instance(text: str) -> CoveringSdpInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocument("top level must be an object")
    try:
        n, d, c, A, B = doc["n"], doc["d"], doc["c"], doc["A"], doc["B"]
    except KeyError as exc:
        raise MalformedDocument(f"missing field {exc}") from exc
    boxed = doc.get("boxed", False)
    if not isinstance(boxed, bool):
        raise MalformedDocument("boxed must be a boolean")
    return make_sdp_instance(n, d, c, A, B, boxed)


def serialize_sdp_instance(inst: CoveringSdpInstance) -> str:
    doc = {
        "n": inst.n,
        "d": inst.d,
        "c": [float(v) for v in inst.c],
        "A": [[float(v) for v in m.ravel()] for m in inst.A],
        "B": [[float(v) for v in m.ravel()] for m in inst.B_stream],
        "boxed": inst.boxed,
    }
    return json.dumps(doc)


# --- advice ------------------------------------------------------------------


def validate_advice(x_prime, lam, n: int, boxed: bool) -> AdviceVector:
    x = np.asarray(x_prime, dtype=float)
    if x.shape != (n,):
        raise LengthMismatch(f"advice has shape {x.shape}, expected ({n},)")
    if not np.all(np.isfinite(x)):
        raise MalformedDocument("advice must be finite")
    if np.any(x < 0):
        raise NegativeAdvice("advice entries must be nonnegative")
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise LambdaOutOfRange(f"lambda {lam} outside [0, 1]")
    if boxed and np.any(x > 1.0 + 1e-12):
        raise AdviceAboveCap("boxed advice entries must be at most 1")
    return AdviceVector(x_prime=x, lam=lam)


def parse_advice(text: str, n: int, boxed: bool) -> AdviceVector:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "lambda" not in doc or "x" not in doc:
        raise MalformedDocument('advice document needs "lambda" and "x"')
    return validate_advice(doc["x"], doc["lambda"], n, boxed)


def serialize_advice(adv: AdviceVector) -> str:
    return json.dumps({"lambda": adv.lam, "x": [float(v) for v in adv.x_prime]})
