"""Sign-pattern sufficient conditions for a positive vector in ``Im(R)``.

Every check here either proves herdability and returns an explicit
certificate, or gives up with ``Unknown``.  The proofs share one shape: the
rows of ``R`` are split into blocks that are eliminated in order, each block
owning some columns whose signed sum is positive on the block's rows and zero
on every row eliminated later.  Such an elimination trace is block upper
triangular, so a certificate can be assembled back to front by giving each
earlier block enough gain to dominate the later ones.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import CertificateAssemblyError
from .linalg import SignClass, as_matrix, as_vector, has_zero_row, is_exact, resolve_eps, sign_class
from .oracle import HerdabilityVerdict, Status, positive_image_feasible, verify_certificate

log = logging.getLogger(__name__)

MAX_GAIN = 2**60


def nonzero_pattern(v, eps: float | None = None) -> frozenset[int]:
    """Indices of the entries of ``v`` that are nonzero (``|v_i| > eps``)."""
    tol = resolve_eps(eps)
    return frozenset(i for i, x in enumerate(v) if sign_class(x, tol) != SignClass.ZERO)


def is_unisigned(v, eps: float | None = None) -> SignClass | None:
    """Common sign of the nonzero entries of ``v``; None for zero or mixed vectors."""
    tol = resolve_eps(eps)
    seen = {sign_class(x, tol) for x in v} - {SignClass.ZERO}
    if len(seen) == 1:
        return seen.pop()
    return None


@dataclass(frozen=True)
class UnisignAnalysis:
    J: tuple[int, ...]
    H: frozenset[int]
    column_signs: dict


def unisign_analysis(R, rows: Iterable[int] | None = None, eps: float | None = None) -> UnisignAnalysis:
    """Unisigned columns of ``R`` (optionally restricted to ``rows``) and the rows they cover."""
    R = as_matrix(R)
    tol = resolve_eps(eps)
    idx = sorted(range(R.shape[0]) if rows is None else rows)
    J = []
    H: set[int] = set()
    col_signs = {}
    for j in range(R.shape[1]):
        col = R[idx, j]
        col_signs[j] = is_unisigned(col, tol)
        if col_signs[j] is not None:
            J.append(j)
            H.update(idx[i] for i in nonzero_pattern(col, tol))
    return UnisignAnalysis(tuple(J), frozenset(H), col_signs)


@dataclass(frozen=True)
class EliminationStep:
    """One block of an elimination trace.

    ``direction`` gives the coefficient applied to each of ``columns``;
    the combination must be positive on ``rows`` and vanish on the rows of
    every later step.
    """

    columns: tuple[int, ...]
    direction: tuple[int, ...]
    rows: frozenset[int]

    def as_dict(self) -> dict:
        return {
            "columns": list(self.columns),
            "direction": list(self.direction),
            "rows": sorted(self.rows),
        }


def compose_block_certificates(R, trace: Sequence[EliminationStep], eps: float | None = None) -> np.ndarray:
    """Assemble ``u`` with ``R u >= 1`` from an elimination trace.

    Steps are processed from last to first.  Each step's gain starts at 1 and
    doubles until its rows reach 1 on top of the contribution already fixed
    by later steps.
    """
    R = as_matrix(R)
    exact = is_exact(R)
    tol = resolve_eps(eps)
    k = R.shape[1]
    u = [Fraction(0) if exact else 0.0] * k

    for step in reversed(trace):
        rows = sorted(step.rows)
        if not rows or not step.columns:
            continue
        sub = R[rows]
        fixed = [sum(a * b for a, b in zip(row, u)) for row in sub]
        push = [sum(row[c] * d for c, d in zip(step.columns, step.direction)) for row in sub]
        if any(sign_class(p, tol) != SignClass.POSITIVE for p in push):
            raise CertificateAssemblyError(f"step on columns {step.columns} is not positive on its rows")
        gain = 1
        while any(gain * p + f < 1 for p, f in zip(push, fixed)):
            gain *= 2
            if gain > MAX_GAIN:
                raise CertificateAssemblyError(f"gain for columns {step.columns} exceeded 2**60")
        for c, d in zip(step.columns, step.direction):
            u[c] += gain * d

    cert = as_vector(
        [v.numerator if isinstance(v, Fraction) and v.denominator == 1 else v for v in u],
        exact=exact,
    )
    if not verify_certificate(R, cert):
        raise CertificateAssemblyError("assembled vector does not pass verification")
    return cert


def certified_verdict(R, trace: Sequence[EliminationStep], eps: float | None = None, **details) -> HerdabilityVerdict:
    """Herdable verdict for a successful trace; falls back to the oracle certificate if assembly fails."""
    details["trace"] = [s.as_dict() for s in trace]
    try:
        cert = compose_block_certificates(R, trace, eps)
    except CertificateAssemblyError as exc:
        log.warning("certificate assembly failed (%s); using the oracle certificate", exc)
        fallback = positive_image_feasible(R, eps)
        if not fallback.is_herdable:
            raise
        cert = fallback.certificate
        details["certificate_source"] = "oracle"
    return HerdabilityVerdict(Status.HERDABLE, certificate=cert, details=details)


def _sign_int(s: SignClass) -> int:
    return int(s)


def lemma_a_trace(R, eps: float | None = None) -> list[EliminationStep] | None:
    """Trace for the unisigned-cover test (|H| >= n - 1), or None if it does not apply."""
    R = as_matrix(R)
    tol = resolve_eps(eps)
    n = R.shape[0]
    if has_zero_row(R, tol) is not None:
        return None
    an = unisign_analysis(R, eps=tol)
    if len(an.H) < n - 1:
        return None
    steps = []
    if an.J:
        steps.append(EliminationStep(an.J, tuple(_sign_int(an.column_signs[j]) for j in an.J), an.H))
    if len(an.H) == n - 1:
        (i,) = set(range(n)) - an.H
        h = next(j for j in range(R.shape[1]) if j not in an.J and sign_class(R[i, j], tol) != SignClass.ZERO)
        steps.append(EliminationStep((h,), (_sign_int(sign_class(R[i, h], tol)),), frozenset({i})))
    return steps


def lemma_c_trace(R, eps: float | None = None) -> list[EliminationStep] | None:
    """Trace for the two-block test: unisigned columns, then columns sign-uniform off ``H``."""
    R = as_matrix(R)
    tol = resolve_eps(eps)
    n = R.shape[0]
    if has_zero_row(R, tol) is not None:
        return None
    an = unisign_analysis(R, eps=tol)
    outside = sorted(set(range(n)) - an.H)
    chosen: dict[int, int] = {}
    for h in outside:
        found = None
        for j in range(R.shape[1]):
            if j in an.J or sign_class(R[h, j], tol) == SignClass.ZERO:
                continue
            s = is_unisigned(R[outside, j], tol)
            if s is not None:
                found = (j, s)
                break
        if found is None:
            return None
        chosen.setdefault(found[0], _sign_int(found[1]))
    steps = []
    if an.J:
        steps.append(EliminationStep(an.J, tuple(_sign_int(an.column_signs[j]) for j in an.J), an.H))
    if outside:
        cols = tuple(sorted(chosen))
        steps.append(EliminationStep(cols, tuple(chosen[c] for c in cols), frozenset(outside)))
    return steps


def greedy_trace(R, eps: float | None = None) -> tuple[list[EliminationStep], frozenset[int]]:
    """Run the greedy elimination; return the trace and the rows left uncovered.

    Columns are scanned in ascending order and the scan restarts from the
    lowest remaining column after every elimination.
    """
    R = as_matrix(R)
    tol = resolve_eps(eps)
    remaining = set(range(R.shape[0]))
    available = list(range(R.shape[1]))
    steps: list[EliminationStep] = []
    while remaining:
        idx = sorted(remaining)
        for j in available:
            col = R[idx, j]
            s = is_unisigned(col, tol)
            if s is not None:
                covered = frozenset(idx[i] for i in nonzero_pattern(col, tol))
                steps.append(EliminationStep((j,), (_sign_int(s),), covered))
                remaining -= covered
                available.remove(j)
                break
        else:
            break
    return steps, frozenset(remaining)


def lemma_A_check(R, eps: float | None = None) -> HerdabilityVerdict:
    """Herdable when ``R`` has no zero rows and its unisigned columns cover at least n - 1 rows."""
    trace = lemma_a_trace(R, eps)
    if trace is None:
        return HerdabilityVerdict.unknown(check="lemma_A")
    return certified_verdict(R, trace, eps, check="lemma_A")


def lemma_C_check(R, eps: float | None = None) -> HerdabilityVerdict:
    trace = lemma_c_trace(R, eps)
    if trace is None:
        return HerdabilityVerdict.unknown(check="lemma_C")
    return certified_verdict(R, trace, eps, check="lemma_C")


def greedy_check(R, eps: float | None = None) -> HerdabilityVerdict:
    """Greedy column elimination; Herdable when every row gets eliminated."""
    trace, left = greedy_trace(R, eps)
    if left:
        return HerdabilityVerdict.unknown(
            check="greedy",
            trace=[s.as_dict() for s in trace],
            uncovered_rows=sorted(left),
        )
    return certified_verdict(R, trace, eps, check="greedy")
