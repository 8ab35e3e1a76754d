"""System files and JSON reports.

Two input formats describe the same :class:`SystemDescriptor`:

JSON::

    {"n": 3, "A": [[...], ...] | "edges": [[i, j, w], ...],
     "leaders": [1, ...] | "B": [[...], ...],
     "directed": true, "mode": "exact" | "float"}

Edge list (UTF-8, LF)::

    # n=3 leaders=1,2 directed=0 [mode=exact]
    1 2 1
    2 3 -1

Node indices are 1-based.  An edge ``i j w`` is an arc from i to j, stored as
``A[j][i] = w``; undirected edges also set ``A[i][j] = w``.  Without an
explicit mode, integer weights give exact arithmetic and any float gives
float mode; ``HERD_MODE`` overrides both.
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from .errors import ArgumentError, ConventionError, HerdkitError, NumericError, ParseError
from .graph import ARC_CONVENTION
from .linalg import as_matrix

SCHEMA = "herdkit/1"
MODES = ("exact", "float")
_HEADER = re.compile(r"^#\s*n=(\S+)\s+leaders=(\S*)\s+directed=(\S+)(?:\s+mode=(\S+))?\s*$")


@dataclass(frozen=True, eq=False)
class SystemDescriptor:
    """A parsed system.  ``leaders`` are 0-based; exactly one of ``B`` / ``leaders`` is set."""

    n: int
    A: np.ndarray
    B: np.ndarray | None
    leaders: tuple[int, ...] | None
    directed: bool
    mode: str

    def __post_init__(self):
        if (self.B is None) == (self.leaders is None):
            raise ConventionError("exactly one of B and leaders must be given")

    def input_matrix(self) -> np.ndarray:
        """``B``, or the selection matrix with a unit column per leader (in listed order)."""
        if self.B is not None:
            return self.B
        rows = [[1 if i == l else 0 for l in self.leaders] for i in range(self.n)]
        return as_matrix(rows, exact=self.mode == "exact")

    def leader_set(self) -> tuple[int, ...]:
        """Leaders, recovered from ``B`` when it is a selection matrix."""
        if self.leaders is not None:
            return self.leaders
        out = []
        for col in self.B.T:
            nz = [i for i, x in enumerate(col) if x != 0]
            if len(nz) != 1 or col[nz[0]] != 1:
                raise ArgumentError("B is not a leader selection matrix")
            out.append(nz[0])
        if len(set(out)) != len(out):
            raise ArgumentError("B selects the same node twice")
        return tuple(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SystemDescriptor):
            return NotImplemented
        same_b = (self.B is None and other.B is None) or (
            self.B is not None and other.B is not None and _same(self.B, other.B)
        )
        return (
            self.n == other.n
            and self.leaders == other.leaders
            and self.directed == other.directed
            and self.mode == other.mode
            and _same(self.A, other.A)
            and same_b
        )

    __hash__ = None


def _same(X: np.ndarray, Y: np.ndarray) -> bool:
    return X.shape == Y.shape and all(a == b for a, b in zip(X.ravel(), Y.ravel()))


def _mode_override(mode: str | None) -> str | None:
    env = os.environ.get("HERD_MODE", "").strip()
    if env:
        if env not in MODES:
            raise ParseError(f"HERD_MODE must be one of {MODES}, got {env!r}")
        return env
    if mode is not None and mode not in MODES:
        raise ParseError(f"field 'mode': expected one of {MODES}, got {mode!r}")
    return mode


def _number(x, where: str):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"{where}: expected a number, got {x!r}")
    if isinstance(x, float) and not math.isfinite(x):
        raise ParseError(f"{where}: non-finite weight")
    return x


def _build(n, dense, edges, B, leaders, directed, mode) -> SystemDescriptor:
    """Assemble a descriptor; ``edges`` are 0-based (src, dst, w, where)."""
    if dense is None:
        dense = [[0] * n for _ in range(n)]
        seen = {}
        for src, dst, w, where in edges:
            key = (src, dst) if directed else tuple(sorted((src, dst)))
            if key in seen:
                raise ParseError(f"{where}: duplicate edge (first given at {seen[key]})")
            seen[key] = where
            dense[dst][src] = w
            if not directed:
                dense[src][dst] = w
    values = [x for row in dense for x in row]
    if B is not None:
        values += [x for row in B for x in row]
    mode = _mode_override(mode) or ("exact" if all(isinstance(x, int) for x in values) else "float")
    try:
        A = as_matrix(dense, exact=mode == "exact")
        Bm = None if B is None else as_matrix(B, exact=mode == "exact")
    except (NumericError, HerdkitError) as exc:
        raise ParseError(f"mode {mode}: {exc}") from exc
    if not directed and not _same(A, A.T):
        raise ParseError("directed=false but A is not symmetric")
    return SystemDescriptor(n, A, Bm, None if leaders is None else tuple(leaders), bool(directed), mode)


def _leaders(raw, n: int, where: str) -> list[int]:
    out = []
    for k, v in enumerate(raw):
        if isinstance(v, bool) or not isinstance(v, int) or not 1 <= v <= n:
            raise ParseError(f"{where}[{k}]: leader must be an integer in 1..{n}, got {v!r}")
        out.append(v - 1)
    if not out:
        raise ParseError(f"{where}: at least one leader is required")
    if len(set(out)) != len(out):
        raise ParseError(f"{where}: duplicate leaders")
    return out


def _parse_json(text: str) -> SystemDescriptor:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object")
    unknown = set(doc) - {"n", "A", "edges", "B", "leaders", "directed", "mode"}
    if unknown:
        raise ParseError(f"unknown fields: {sorted(unknown)}")
    n = doc.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParseError(f"field 'n': expected a positive integer, got {n!r}")
    if ("B" in doc) and ("leaders" in doc):
        raise ConventionError("fields 'B' and 'leaders' are mutually exclusive")
    if ("B" not in doc) and ("leaders" not in doc):
        raise ParseError("one of fields 'B' or 'leaders' is required")
    if ("A" in doc) == ("edges" in doc):
        raise ParseError("exactly one of fields 'A' or 'edges' is required")
    directed = doc.get("directed", True)
    if not isinstance(directed, bool):
        raise ParseError(f"field 'directed': expected a boolean, got {directed!r}")

    dense = None
    edges = []
    if "A" in doc:
        rows = doc["A"]
        if not isinstance(rows, list) or len(rows) != n:
            raise ParseError(f"field 'A': expected {n} rows")
        dense = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise ParseError(f"field 'A' row {i + 1}: expected {n} entries")
            dense.append([_number(x, f"A[{i + 1}][{j + 1}]") for j, x in enumerate(row)])
    else:
        if not isinstance(doc["edges"], list):
            raise ParseError("field 'edges': expected a list")
        for k, e in enumerate(doc["edges"]):
            where = f"edges[{k}]"
            if not isinstance(e, list) or len(e) != 3:
                raise ParseError(f"{where}: expected [i, j, w]")
            i, j, w = e
            for v in (i, j):
                if isinstance(v, bool) or not isinstance(v, int) or not 1 <= v <= n:
                    raise ParseError(f"{where}: node index must be an integer in 1..{n}, got {v!r}")
            edges.append((i - 1, j - 1, _number(w, where), where))

    B = leaders = None
    if "B" in doc:
        rows = doc["B"]
        if not isinstance(rows, list) or len(rows) != n or not rows:
            raise ParseError(f"field 'B': expected {n} rows")
        width = len(rows[0]) if isinstance(rows[0], list) else -1
        if width < 1:
            raise ParseError("field 'B': rows must be nonempty lists")
        B = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != width:
                raise ParseError(f"field 'B' row {i + 1}: expected {width} entries")
            B.append([_number(x, f"B[{i + 1}][{j + 1}]") for j, x in enumerate(row)])
    else:
        if not isinstance(doc["leaders"], list):
            raise ParseError("field 'leaders': expected a list")
        leaders = _leaders(doc["leaders"], n, "leaders")
    return _build(n, dense, edges, B, leaders, directed, doc.get("mode"))


def _edge_weight(tok: str, where: str):
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        w = float(tok)
    except ValueError as exc:
        raise ParseError(f"{where}: weight {tok!r} is not a number") from exc
    return _number(w, where)


def _parse_edges(text: str) -> SystemDescriptor:
    lines = text.split("\n")
    header = None
    edges = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header is None and not edges:
                m = _HEADER.match(line)
                if m is None:
                    raise ParseError(f"line {lineno}: header must read '# n=<int> leaders=<csv> directed=<0|1>'")
                header = (lineno, m)
            continue
        if header is None:
            raise ParseError(f"line {lineno}: missing '# n=... leaders=... directed=...' header")
        toks = line.split()
        where = f"line {lineno}"
        if len(toks) != 3:
            raise ParseError(f"{where}: expected 'i j w', got {len(toks)} fields")
        try:
            i, j = int(toks[0]), int(toks[1])
        except ValueError as exc:
            raise ParseError(f"{where}: node indices must be integers") from exc
        edges.append((i, j, _edge_weight(toks[2], where), where))
    if header is None:
        raise ParseError("line 1: missing header")
    lineno, m = header
    try:
        n = int(m.group(1))
    except ValueError as exc:
        raise ParseError(f"line {lineno}: n must be an integer") from exc
    if n < 1:
        raise ParseError(f"line {lineno}: n must be positive")
    if m.group(3) not in ("0", "1"):
        raise ParseError(f"line {lineno}: directed must be 0 or 1")
    try:
        raw_leaders = [int(t) for t in m.group(2).split(",") if t]
    except ValueError as exc:
        raise ParseError(f"line {lineno}: leaders must be comma-separated integers") from exc
    leaders = _leaders(raw_leaders, n, f"line {lineno} leaders")
    zero_based = []
    for i, j, w, where in edges:
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"{where}: node index out of range 1..{n}")
        zero_based.append((i - 1, j - 1, w, where))
    return _build(n, None, zero_based, None, leaders, m.group(3) == "1", m.group(4))


def parse_system(text: bytes | str, format: str = "json") -> SystemDescriptor:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from exc
    if format == "json":
        return _parse_json(text)
    if format == "edges":
        return _parse_edges(text)
    raise ParseError(f"unknown format {format!r}")


def load_system(path: str, format: str | None = None) -> SystemDescriptor:
    fmt = format or ("json" if str(path).endswith(".json") else "edges")
    with open(path, "rb") as fh:
        return parse_system(fh.read(), fmt)


def _plain(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


def serialize_system(desc: SystemDescriptor, format: str = "json") -> str:
    """Text that :func:`parse_system` maps back to ``desc``."""
    A = desc.A
    if format == "json":
        doc: dict[str, Any] = {"n": desc.n, "directed": desc.directed, "mode": desc.mode}
        doc["A"] = [[_plain(x) for x in row] for row in A]
        if desc.B is not None:
            doc["B"] = [[_plain(x) for x in row] for row in desc.B]
        else:
            doc["leaders"] = [l + 1 for l in desc.leaders]
        return json.dumps(doc, sort_keys=True) + "\n"
    if format == "edges":
        if desc.B is not None:
            raise ArgumentError("the edge-list format only carries leaders, not B")
        lines = [
            f"# n={desc.n} leaders={','.join(str(l + 1) for l in desc.leaders)} "
            f"directed={int(desc.directed)} mode={desc.mode}"
        ]
        for dst in range(desc.n):
            for src in range(desc.n):
                w = A[dst, src]
                if w == 0 or (not desc.directed and src > dst):
                    continue
                lines.append(f"{src + 1} {dst + 1} {_fmt_weight(w)}")
        return "\n".join(lines) + "\n"
    raise ArgumentError(f"unknown format {format!r}")


def _fmt_weight(w) -> str:
    w = _plain(w)
    if isinstance(w, str):
        raise ArgumentError(f"fractional weight {w} cannot be written in exact mode")
    return repr(w)


def _round(x: float):
    if not math.isfinite(x):
        raise NumericError("report contains a non-finite number")
    r = float(f"{x:.12g}")
    return 0.0 if r == 0 else r


def to_jsonable(obj):
    """Plain JSON values: Fractions as "p/q", floats at 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else str(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "value"):
        return to_jsonable(obj.value)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def make_report(status: str, details: dict | None = None, certificate=None, witness=None, **extra) -> dict:
    report = {"schema": SCHEMA, "arc_convention": ARC_CONVENTION, "status": str(status)}
    if certificate is not None:
        report["certificate"] = certificate
    if witness is not None:
        report["witness"] = witness
    report["details"] = details or {}
    report.update(extra)
    return report


def dumps_report(report: dict) -> str:
    """Deterministic text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2, ensure_ascii=True, allow_nan=False) + "\n"


def parse_diagonal_pair(text: bytes | str):
    """``{"lambda": [...], "gamma": [...]}`` -> (lambdas, gammas)."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "lambda" not in doc or "gamma" not in doc:
        raise ParseError("expected an object with fields 'lambda' and 'gamma'")
    lam, gam = doc["lambda"], doc["gamma"]
    for name, v in (("lambda", lam), ("gamma", gam)):
        if not isinstance(v, list) or not v:
            raise ParseError(f"field {name!r}: expected a nonempty list")
    if len(lam) != len(gam):
        raise ParseError("fields 'lambda' and 'gamma' differ in length")
    lam = [_number(x, f"lambda[{k}]") for k, x in enumerate(lam)]
    gam = [_number(x, f"gamma[{k}]") for k, x in enumerate(gam)]
    return lam, gam


__all__ = [
    "SCHEMA",
    "SystemDescriptor",
    "dumps_report",
    "load_system",
    "make_report",
    "parse_diagonal_pair",
    "parse_system",
    "serialize_system",
    "to_jsonable",
]
