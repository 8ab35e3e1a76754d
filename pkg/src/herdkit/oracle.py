"""Exact decision of whether the image of a matrix meets the open positive orthant.

A pair ``(A, B)`` is herdable exactly when ``Im R(A, B)`` contains a strictly
positive vector.  By scaling, that is the same as feasibility of ``M u >= 1``
with ``u`` free, which we settle with a phase-1 simplex:

    min 1's   subject to   M u+ - M u- - t + s = 1,   u+, u-, t, s >= 0

The optimum is zero iff the system is feasible.  Otherwise the optimal dual
``y`` satisfies ``y >= 0``, ``y'M = 0`` and ``1'y > 0``: a Farkas witness.

Exact matrices are pivoted in rational arithmetic, so verdicts on integer
input are exact.  Float matrices are row/column equilibrated first and pivoted
with small absolute tolerances.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DimensionError, NumericError
from .linalg import (
    SignClass,
    as_matrix,
    as_vector,
    coerce,
    controllability_matrix,
    has_zero_row,
    is_exact,
    resolve_eps,
    sign_class,
)

CERT_TOL = 1e-8
_PIVOT_TOL = 1e-11
_OBJ_TOL = 1e-9


class Status(str, enum.Enum):
    HERDABLE = "Herdable"
    NOT_HERDABLE = "NotHerdable"
    UNKNOWN = "Unknown"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class HerdabilityVerdict:
    """Outcome of a herdability test.

    ``certificate`` is an input-space vector ``u`` with ``M u >= 1``;
    ``witness`` is a nonnegative, nonzero ``w`` with ``w'M = 0``.
    ``details`` carries check-specific diagnostics (traces, violating pairs).
    """

    status: Status
    certificate: np.ndarray | None = None
    witness: np.ndarray | None = None
    details: dict = field(default_factory=dict, compare=False)

    @property
    def is_herdable(self) -> bool:
        return self.status is Status.HERDABLE

    @classmethod
    def unknown(cls, **details) -> HerdabilityVerdict:
        return cls(Status.UNKNOWN, details=details)


def verify_certificate(M, u) -> bool:
    """True iff every component of ``M u`` is at least ``1 - 1e-8``."""
    M = as_matrix(M)
    u = as_vector(u)
    if u.shape[0] != M.shape[1]:
        raise DimensionError(f"certificate has {u.shape[0]} entries, matrix has {M.shape[1]} columns")
    M, U = coerce(M, u.reshape(-1, 1))
    Mu = M.dot(U)[:, 0]
    if is_exact(M):
        bound = 1 - Fraction(1, 10**8)
        return all(x >= bound for x in Mu)
    return bool(np.all(Mu >= 1 - CERT_TOL))


def verify_witness(M, w, tol: float = 1e-9) -> bool:
    """True iff ``w >= 0``, ``w != 0`` and every entry of ``w'M`` is within ``tol`` of zero."""
    M = as_matrix(M)
    w = as_vector(w)
    if w.shape[0] != M.shape[0]:
        raise DimensionError(f"witness has {w.shape[0]} entries, matrix has {M.shape[0]} rows")
    M, W = coerce(M, w.reshape(-1, 1))
    wv = W[:, 0]
    if any(x < 0 for x in wv) or all(x == 0 for x in wv):
        return False
    wM = M.T.dot(wv)
    if is_exact(M):
        return all(x == 0 for x in wM)
    scale = float(np.max(np.abs(wv)))
    return bool(np.all(np.abs(wM) <= tol * max(scale, 1.0)))


def _simplify(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _phase_one(M: np.ndarray, exact: bool):
    """Run phase-1 simplex with Bland's rule; return (optimum, x, y)."""
    n, k = M.shape
    ncol = 2 * k + 2 * n
    art0 = 2 * k + n
    dtype = object if exact else float
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    tol = 0 if exact else _PIVOT_TOL

    T = np.empty((n, ncol + 1), dtype=dtype)
    T[:, :] = zero
    for i in range(n):
        for j in range(k):
            v = Fraction(M[i, j]) if exact else float(M[i, j])
            T[i, j] = v
            T[i, k + j] = -v
        T[i, 2 * k + i] = -one
        T[i, art0 + i] = one
        T[i, ncol] = one
    basis = [art0 + i for i in range(n)]
    cost = np.empty(ncol + 1, dtype=dtype)
    cost[:] = zero
    cost[art0:ncol] = one
    # reduced costs and (negated) objective value
    z = cost.copy()
    for i in range(n):
        z = z - T[i]

    max_iter = 50 * (ncol + n) ** 2
    for _ in range(max_iter):
        entering = next((j for j in range(ncol) if z[j] < -tol), None)
        if entering is None:
            break
        best = None
        for i in range(n):
            a = T[i, entering]
            if a > tol:
                ratio = T[i, ncol] / a
                if best is None or ratio < best[0] - tol or (
                    abs(ratio - best[0]) <= tol and basis[i] < best[1]
                ):
                    best = (ratio, basis[i], i)
        if best is None:
            raise NumericError("phase-1 program reported unbounded; this cannot happen")
        r = best[2]
        T[r] = T[r] / T[r, entering]
        for i in range(n):
            if i != r:
                f = T[i, entering]
                if f != 0:
                    T[i] = T[i] - f * T[r]
        f = z[entering]
        z = z - f * T[r]
        basis[r] = entering
    else:
        raise NumericError("simplex iteration limit reached")

    optimum = -z[ncol]
    x = [zero] * ncol
    for i, b in enumerate(basis):
        x[b] = T[i, ncol]
    # reduced cost of artificial column i is 1 - y_i
    y = [one - z[art0 + i] for i in range(n)]
    return optimum, x, y


def positive_image_feasible(M, eps: float | None = None) -> HerdabilityVerdict:
    """Decide whether ``Im(M)`` contains a strictly positive vector.

    Returns Herdable with ``u`` such that ``M u >= 1``, or NotHerdable with a
    Farkas witness ``w``.  Never returns Unknown.
    """
    M = as_matrix(M)
    tol = resolve_eps(eps)
    n, k = M.shape
    exact = is_exact(M)

    zrow = has_zero_row(M, tol)
    if zrow is not None:
        w = [0] * n
        w[zrow] = 1
        return HerdabilityVerdict(
            Status.NOT_HERDABLE,
            witness=as_vector(w, exact=exact),
            details={"zero_row": zrow},
        )

    keep = [j for j in range(k) if any(sign_class(x, tol) != SignClass.ZERO for x in M[:, j])]
    sub = M[:, keep]

    if exact:
        optimum, x, y = _phase_one(sub, exact=True)
        feasible = optimum == 0
        row_scale = np.ones(n, dtype=object)
        col_scale = np.ones(len(keep), dtype=object)
    else:
        # equilibrate: positive row scaling and column scaling preserve the answer
        S = np.where(np.abs(sub) <= tol, 0.0, sub)
        row_scale = 1.0 / np.max(np.abs(S), axis=1)
        S = S * row_scale[:, None]
        col_scale = 1.0 / np.max(np.abs(S), axis=0)
        S = S * col_scale[None, :]
        optimum, x, y = _phase_one(S, exact=False)
        feasible = optimum <= _OBJ_TOL

    kk = len(keep)
    if feasible:
        u_sub = [(x[j] - x[kk + j]) * col_scale[j] for j in range(kk)]
        u = [0] * k
        for j, val in zip(keep, u_sub):
            u[j] = val
        u_vec = _normalize(M, u, exact)
        return HerdabilityVerdict(Status.HERDABLE, certificate=u_vec, details={"phase1_optimum": _simplify(optimum)})

    w = [y[i] * row_scale[i] for i in range(n)]
    if exact:
        w_vec = as_vector([_simplify(v) for v in w], exact=True)
    else:
        w_arr = np.clip(np.array(w, dtype=float), 0.0, None)
        w_vec = as_vector(w_arr / np.max(w_arr), exact=False)
    return HerdabilityVerdict(Status.NOT_HERDABLE, witness=w_vec, details={"phase1_optimum": _simplify(optimum)})


def _normalize(M: np.ndarray, u, exact: bool) -> np.ndarray:
    """Scale a direction with ``M u >> 0`` so that ``min(M u) >= 1``."""
    if exact:
        u = [Fraction(v) for v in u]
        Mu = [sum(Fraction(a) * b for a, b in zip(row, u)) for row in M]
        low = min(Mu)
        if low <= 0:
            raise NumericError("certificate direction is not strictly positive")
        if low < 1:
            u = [v / low for v in u]
        return as_vector([_simplify(v) for v in u], exact=True)
    u = np.array(u, dtype=float)
    Mu = M.dot(u)
    low = float(np.min(Mu))
    if low <= 0:
        raise NumericError("certificate direction is not strictly positive")
    if low < 1:
        u = u / low
    return as_vector(u, exact=False)


def herdable(A, B, eps: float | None = None) -> HerdabilityVerdict:
    """Exact herdability of the pair ``(A, B)`` through its controllability matrix."""
    A = as_matrix(A)
    R = controllability_matrix(A, B, A.shape[0])
    return positive_image_feasible(R, eps)
