"""Open-loop input sequences that drive every state above a threshold.

Over a horizon of n steps, ``x(n) = A^n x0 + R ubar`` where ``ubar`` stacks
the inputs in reverse time: block k of ``ubar`` multiplies ``A^k B`` and is
applied at step ``n - 1 - k``, so the leading block is the most recent input.
Scaling a certificate ``u`` (``R u >= 1``) by ``alpha`` lifts every component
of ``x(n)`` by at least ``alpha``.

Exact inputs (integers, fractions) stay exact end to end.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionError, NotHerdableError, NumericError
from .linalg import as_matrix, as_vector, coerce, controllability_matrix, is_exact
from .oracle import herdable, verify_certificate

THRESHOLD_TOL = 1e-6


@dataclass(frozen=True)
class HerdingPlan:
    """Inputs ``inputs[t]`` for t = 0..n-1 and the trajectory ``x(0)..x(n)``."""

    inputs: np.ndarray
    trajectory: np.ndarray
    alpha: object
    h: object

    @property
    def final_time(self) -> int:
        return self.inputs.shape[0]

    @property
    def final_state(self) -> np.ndarray:
        return self.trajectory[-1]

    def meets_threshold(self, tol: float = THRESHOLD_TOL) -> bool:
        return all(x >= self.h - tol for x in self.final_state)


def simulate(A, B, x0, inputs) -> np.ndarray:
    """States ``x(0), ..., x(T)`` for ``x(t+1) = A x(t) + B u(t)``."""
    A, B = as_matrix(A), as_matrix(B)
    n, m = B.shape
    x = as_matrix(as_vector(x0))
    U = [as_matrix(as_vector(u)) for u in inputs]
    if A.shape != (n, n) or x.shape != (n, 1):
        raise DimensionError(f"inconsistent shapes: A {A.shape}, B {B.shape}, x0 has {x.shape[0]} entries")
    for t, u in enumerate(U):
        if u.shape != (m, 1):
            raise DimensionError(f"input {t} has {u.shape[0]} entries, expected {m}")
    A, B, x, *U = coerce(A, B, x, *U)
    states = [x[:, 0]]
    cur = x
    for u in U:
        cur = A.dot(cur) + B.dot(u)
        states.append(cur[:, 0])
    return np.array(states, dtype=states[0].dtype)


def _as_scalar(h, exact: bool):
    if exact and isinstance(h, (int, Fraction)):
        return h
    if exact and isinstance(h, float) and h.is_integer():
        return int(h)
    return float(h)


def synthesize_plan(A, B, x0, h, eps: float | None = None, certificate=None) -> HerdingPlan:
    """Inputs driving ``x(n) >= h`` componentwise from ``x0`` in n steps."""
    A, B = as_matrix(A), as_matrix(B)
    n, m = B.shape
    if certificate is None:
        verdict = herdable(A, B, eps)
        if not verdict.is_herdable:
            raise NotHerdableError("pair is not herdable")
        certificate = verdict.certificate
    R = controllability_matrix(A, B, n)
    if not verify_certificate(R, certificate):
        raise NumericError("certificate does not satisfy R u >= 1")
    x = as_matrix(as_vector(x0))
    if x.shape != (n, 1):
        raise DimensionError(f"x0 must have {n} entries, got {x.shape[0]}")
    A, R, x, U = coerce(A, R, x, as_matrix(as_vector(certificate)))
    exact = is_exact(A)
    h = _as_scalar(h, exact)

    free = x
    for _ in range(n):
        free = A.dot(free)
    push = R.dot(U)[:, 0]
    gaps = [Fraction(h - f) / p if exact else (h - f) / p for f, p in zip(free[:, 0], push)]
    alpha = max([0, *gaps])
    if exact and isinstance(alpha, Fraction) and alpha.denominator == 1:
        alpha = alpha.numerator
    ubar = [alpha * v for v in U[:, 0]]
    if not exact and not np.all(np.isfinite(np.array(ubar, dtype=float))):
        raise NumericError("input sequence is not finite")
    inputs = np.array([ubar[(n - 1 - t) * m:(n - t) * m] for t in range(n)], dtype=object if exact else float)
    traj = simulate(A, B if not exact else as_matrix(B, exact=True), x[:, 0], inputs)
    if not exact and not np.all(np.isfinite(traj)):
        raise NumericError("trajectory is not finite")
    return HerdingPlan(inputs, traj, alpha, h)
