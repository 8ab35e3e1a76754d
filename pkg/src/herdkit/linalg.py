"""Dense matrix helpers: ingestion, sign classification, controllability matrices.

Matrices are plain numpy arrays marked read-only.  Two storage modes exist:

* exact: ``dtype=object`` holding Python ``int`` / ``fractions.Fraction``
  values, used whenever every input entry is an integer or a fraction;
* float: ``dtype=float64``, with a global zero tolerance for sign decisions.

Mixing the two in one operation demotes everything to float.
"""

from __future__ import annotations

import enum
import math
import os
from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, NumericError, PartitionError, PermutationError

EPS_DEFAULT = 1e-9


def resolve_eps(eps: float | None = None) -> float:
    """Return ``eps`` or, when it is None, the ``HERD_EPS`` override (default 1e-9)."""
    if eps is not None:
        return float(eps)
    raw = os.environ.get("HERD_EPS")
    if raw is None or raw.strip() == "":
        return EPS_DEFAULT
    try:
        value = float(raw)
    except ValueError as exc:
        raise NumericError(f"HERD_EPS is not a number: {raw!r}") from exc
    if not math.isfinite(value) or value < 0:
        raise NumericError(f"HERD_EPS must be finite and nonnegative, got {raw!r}")
    return value


class SignClass(enum.IntEnum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


def _is_exact_scalar(x) -> bool:
    return isinstance(x, (Integral, Rational)) and not isinstance(x, float)


def _exact_scalar(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Integral):
        return int(x)
    return Fraction(x)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def is_exact(M: np.ndarray) -> bool:
    return M.dtype == object


def as_matrix(data, exact: bool | None = None) -> np.ndarray:
    """Coerce ``data`` to a read-only 2-D matrix.

    With ``exact=None`` the mode is detected: integer and fraction entries
    give an exact matrix, anything else gives float64.  ``exact=True`` on
    fractional floats raises, it never rationalizes silently.
    """
    if isinstance(data, np.ndarray) and data.ndim == 2 and not data.flags.writeable:
        if exact is None or exact == is_exact(data):
            return data
    arr = np.array(data, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError(f"expected a nonempty 2-D matrix, got shape {arr.shape}")
    flat = arr.ravel()
    if any(isinstance(x, (list, tuple, np.ndarray)) for x in flat):
        raise DimensionError("ragged matrix rows")
    all_exact = all(_is_exact_scalar(x) for x in flat)
    if exact is None:
        exact = all_exact
    if exact:
        out = np.empty(arr.shape, dtype=object)
        for idx, x in np.ndenumerate(arr):
            if _is_exact_scalar(x):
                out[idx] = _exact_scalar(x)
                continue
            fx = float(x)
            if not math.isfinite(fx):
                raise NumericError(f"non-finite entry {x!r} at {idx}")
            if fx != int(fx):
                raise NumericError(f"exact mode requires integer weights, got {x!r} at {idx}")
            out[idx] = int(fx)
        return _freeze(out)
    try:
        out = np.array(arr.tolist(), dtype=float)
    except (TypeError, ValueError) as exc:
        raise NumericError(f"matrix entries are not numeric: {exc}") from exc
    if not np.all(np.isfinite(out)):
        raise NumericError("matrix has non-finite entries")
    return _freeze(out)


def as_vector(data, exact: bool | None = None) -> np.ndarray:
    """Coerce ``data`` to a read-only 1-D vector (same mode rules as :func:`as_matrix`)."""
    return _freeze(as_matrix(np.asarray(data, dtype=object).reshape(-1, 1), exact)[:, 0].copy())


def to_float(M: np.ndarray) -> np.ndarray:
    if M.dtype == float:
        return M
    return _freeze(np.array([float(x) for x in M.ravel()], dtype=float).reshape(M.shape))


def coerce(*mats: np.ndarray) -> list[np.ndarray]:
    """Bring matrices to a common storage mode (float wins)."""
    if all(is_exact(M) for M in mats):
        return list(mats)
    return [to_float(M) for M in mats]


def sign_class(x, eps: float | None = None) -> SignClass:
    if _is_exact_scalar(x):
        return SignClass((x > 0) - (x < 0))
    tol = resolve_eps(eps)
    if abs(x) <= tol:
        return SignClass.ZERO
    return SignClass.POSITIVE if x > 0 else SignClass.NEGATIVE


def signs(v: Iterable, eps: float | None = None) -> list[SignClass]:
    tol = resolve_eps(eps)
    return [sign_class(x, tol) for x in v]


def controllability_matrix(A, B, steps: int) -> np.ndarray:
    """Return ``[B | AB | ... | A^(steps-1) B]`` built by repeated multiplication."""
    A, B = coerce(as_matrix(A), as_matrix(B))
    n = A.shape[0]
    if A.shape[1] != n:
        raise DimensionError(f"A must be square, got {A.shape}")
    if B.shape[0] != n:
        raise DimensionError(f"B must have {n} rows, got {B.shape[0]}")
    if int(steps) != steps or steps < 1:
        raise DimensionError(f"steps must be a positive integer, got {steps!r}")
    blocks = [np.array(B)]
    for _ in range(int(steps) - 1):
        blocks.append(A.dot(blocks[-1]))
    return _freeze(np.hstack(blocks))


def block_partition(A, m: int):
    """Split ``A`` into ``(A11, A12, A21, A22)`` with ``A11`` of size m x m."""
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise DimensionError(f"A must be square, got {A.shape}")
    if int(m) != m or not 1 <= m < n:
        raise PartitionError(f"need 1 <= m < n = {n}, got m = {m!r}")
    m = int(m)
    return (
        _freeze(A[:m, :m].copy()),
        _freeze(A[:m, m:].copy()),
        _freeze(A[m:, :m].copy()),
        _freeze(A[m:, m:].copy()),
    )


def _check_perm(perm: Sequence[int], size: int) -> list[int]:
    p = [int(i) for i in perm]
    if len(p) != size or sorted(p) != list(range(size)):
        raise PermutationError(f"{list(perm)!r} is not a permutation of range({size})")
    return p


def permute(M, row_perm: Sequence[int] | None = None, col_perm: Sequence[int] | None = None) -> np.ndarray:
    """Return ``R`` with ``R[i, j] = M[row_perm[i], col_perm[j]]`` (None means identity)."""
    M = as_matrix(M)
    rows = _check_perm(range(M.shape[0]) if row_perm is None else row_perm, M.shape[0])
    cols = _check_perm(range(M.shape[1]) if col_perm is None else col_perm, M.shape[1])
    return _freeze(M[np.ix_(rows, cols)].copy())


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    p = _check_perm(perm, len(perm))
    inv = [0] * len(p)
    for i, pi in enumerate(p):
        inv[pi] = i
    return inv


def has_zero_row(M, eps: float | None = None) -> int | None:
    """Index of the first row whose entries are all zero, or None."""
    tol = resolve_eps(eps)
    for i, row in enumerate(as_matrix(M)):
        if all(sign_class(x, tol) == SignClass.ZERO for x in row):
            return i
    return None


def _rref_exact(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(M) -> int:
    """Matrix rank; Gauss-Jordan over the rationals in exact mode."""
    M = as_matrix(M)
    if is_exact(M):
        _, pivots = _rref_exact([[Fraction(x) for x in row] for row in M])
        return len(pivots)
    return int(np.linalg.matrix_rank(M))


def solve_consistent(M, b, eps: float | None = None) -> np.ndarray:
    """Return some ``x`` with ``M x = b``; raise DimensionError if none exists."""
    M, b = coerce(as_matrix(M), as_matrix(b))
    if b.shape != (M.shape[0], 1):
        raise DimensionError(f"right-hand side must have {M.shape[0]} entries")
    k = M.shape[1]
    if is_exact(M):
        aug = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(M, b[:, 0])]
        red, pivots = _rref_exact(aug)
        if k in pivots:
            raise DimensionError("linear system is inconsistent")
        x = [Fraction(0)] * k
        for row, c in zip(red, pivots):
            x[c] = row[k]
        return as_vector([_exact_scalar(v) for v in x], exact=True)
    x, *_ = np.linalg.lstsq(M, b[:, 0], rcond=None)
    resid = M.dot(x) - b[:, 0]
    scale = max(1.0, float(np.max(np.abs(b))))
    if np.max(np.abs(resid)) > 1e-7 * scale:
        raise DimensionError("linear system is inconsistent")
    return as_vector(x, exact=False)
