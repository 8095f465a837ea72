"""Dense matrix files: CSV and MatrixMarket ``array real general``.

Values are written with 17 significant digits, which round-trips doubles
exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import ProblemInstance
from .errors import NonSquare, ParseError

__all__ = ["FORMATS", "read_matrix", "write_matrix", "guess_format"]

FORMATS = ("csv", "matrixmarket")
_ALIASES = {"csv": "csv", "mm": "matrixmarket", "mtx": "matrixmarket", "matrixmarket": "matrixmarket"}
_MM_HEADER = "%%MatrixMarket matrix array real general"


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _norm_format(fmt: str | None, path) -> str:
    if fmt is None:
        return guess_format(path)
    try:
        return _ALIASES[fmt.lower()]
    except KeyError:
        raise ValueError(f"unknown matrix format {fmt!r}") from None


def guess_format(path) -> str:
    return "matrixmarket" if Path(path).suffix.lower() in (".mm", ".mtx") else "csv"


def _parse_float(tok: str, line: int, col: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"cannot parse {tok.strip()!r} as a number", line, col) from None
    if not np.isfinite(v):
        raise ParseError(f"non-finite value {tok.strip()!r}", line, col)
    return v


def _read_csv(text: str) -> np.ndarray:
    rows = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split(",")
        if width is None:
            width = len(toks)
        elif len(toks) != width:
            raise ParseError(f"row has {len(toks)} entries, expected {width}", lineno)
        rows.append([_parse_float(t, lineno, k + 1) for k, t in enumerate(toks)])
    if not rows:
        raise ParseError("no data rows found")
    return np.array(rows)


def _read_mm(text: str) -> np.ndarray:
    lines = text.splitlines()
    if not lines or not lines[0].lower().startswith("%%matrixmarket"):
        raise ParseError("missing %%MatrixMarket header", 1)
    head = lines[0].lower().split()
    if head[1:5] != ["matrix", "array", "real", "general"]:
        raise ParseError(f"unsupported MatrixMarket type: {lines[0].strip()}", 1)
    body = [(k, l.strip()) for k, l in enumerate(lines[1:], start=2) if l.strip() and not l.lstrip().startswith("%")]
    if not body:
        raise ParseError("missing size line")
    size_line, size = body[0]
    parts = size.split()
    if len(parts) != 2:
        raise ParseError(f"size line must hold two integers, got {size!r}", size_line)
    try:
        m, n = (int(p) for p in parts)
    except ValueError:
        raise ParseError(f"size line must hold two integers, got {size!r}", size_line) from None
    vals = []
    for lineno, l in body[1:]:
        toks = l.split()
        if len(toks) != 1:
            raise ParseError(f"expected one value per line, got {len(toks)}", lineno)
        vals.append(_parse_float(toks[0], lineno, 1))
    if len(vals) != m * n:
        raise ParseError(f"expected {m * n} values for a {m}x{n} array, got {len(vals)}")
    return np.array(vals).reshape((m, n), order="F")


def read_matrix(path, format: str | None = None) -> ProblemInstance:
    """Load a square data matrix; ``format`` is ``csv``, ``mm``/``matrixmarket`` or ``None`` to guess."""
    fmt = _norm_format(format, path)
    text = Path(path).read_text()
    X = _read_csv(text) if fmt == "csv" else _read_mm(text)
    if X.shape[0] != X.shape[1]:
        raise NonSquare(f"matrix in {path} is {X.shape[0]}x{X.shape[1]}, expected square")
    return ProblemInstance(X)


def write_matrix(path, X, format: str | None = None, header: str | None = None) -> None:
    fmt = _norm_format(format, path)
    X = np.asarray(X.Xhat if isinstance(X, ProblemInstance) else X, dtype=float)
    if fmt == "csv":
        out = [f"# {header}"] if header else []
        out += [",".join(_fmt(v) for v in row) for row in X]
    else:
        out = [_MM_HEADER]
        if header:
            out.append(f"% {header}")
        out.append(f"{X.shape[0]} {X.shape[1]}")
        out += [_fmt(v) for v in X.reshape(-1, order="F")]
    Path(path).write_text("\n".join(out) + "\n")
