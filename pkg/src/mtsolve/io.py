"""Text formats: ``tns`` tensor files, ``vec`` vector files, and JSON output."""

from __future__ import annotations

import json
import math
import warnings

import numpy as np

from .tensor import Tensor

__all__ = ["FormatError", "read_tensor", "write_tensor", "read_vec", "write_vec", "dumps"]


class FormatError(ValueError):
    """Malformed input file; the message carries the line number."""


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_tensor(text, source="<string>"):
    """Parse ``tns <m> <n> <nnz>`` followed by ``nnz`` lines ``i1 .. im value`` (1-based)."""
    lines = _lines(text)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise FormatError(f"{source}: empty tensor file") from None
    if len(head) != 4 or head[0] != "tns":
        raise FormatError(f"{source}:{lineno}: expected header 'tns <m> <n> <nnz>'")
    try:
        m, n, nnz = (int(t) for t in head[1:])
    except ValueError:
        raise FormatError(f"{source}:{lineno}: header fields must be integers") from None
    if m < 2 or n < 1 or nnz < 0:
        raise FormatError(f"{source}:{lineno}: need m >= 2, n >= 1, nnz >= 0")
    idx = np.empty((nnz, m), dtype=np.int64)
    vals = np.empty(nnz)
    count = 0
    for lineno, tok in lines:
        if count == nnz:
            raise FormatError(f"{source}:{lineno}: more entries than the header's nnz={nnz}")
        if len(tok) != m + 1:
            raise FormatError(f"{source}:{lineno}: expected {m} indices and a value")
        try:
            ijk = [int(t) for t in tok[:m]]
            v = float(tok[m])
        except ValueError:
            raise FormatError(f"{source}:{lineno}: cannot parse entry") from None
        if any(i < 1 or i > n for i in ijk):
            raise FormatError(f"{source}:{lineno}: index outside 1..{n}")
        if not math.isfinite(v):
            raise FormatError(f"{source}:{lineno}: value must be finite")
        idx[count] = [i - 1 for i in ijk]
        vals[count] = v
        count += 1
    if count != nnz:
        raise FormatError(f"{source}: header announces {nnz} entries, found {count}")
    A = Tensor(m, n, idx, vals)
    if A.n_duplicates:
        warnings.warn(f"{source}: {A.n_duplicates} duplicate index tuples were summed", stacklevel=2)
    return A


def read_tensor(path):
    with open(path, encoding="utf-8") as fh:
        return parse_tensor(fh.read(), str(path))


def format_tensor(A: Tensor):
    out = [f"tns {A.order} {A.dim} {A.nnz}"]
    for t, v in A.entries():
        out.append(" ".join(str(i + 1) for i in t) + f" {v!r}")
    return "\n".join(out) + "\n"


def write_tensor(path, A: Tensor):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_tensor(A))


def parse_vec(text, source="<string>"):
    """Parse ``vec <n>`` followed by ``n`` whitespace-separated values."""
    lines = _lines(text)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise FormatError(f"{source}: empty vector file") from None
    if len(head) < 2 or head[0] != "vec":
        raise FormatError(f"{source}:{lineno}: expected header 'vec <n>'")
    try:
        n = int(head[1])
    except ValueError:
        raise FormatError(f"{source}:{lineno}: vector length must be an integer") from None
    tokens = [(lineno, t) for t in head[2:]]
    for lineno, tok in lines:
        tokens.extend((lineno, t) for t in tok)
    if len(tokens) != n:
        raise FormatError(f"{source}: header announces {n} values, found {len(tokens)}")
    vals = []
    for lineno, t in tokens:
        try:
            vals.append(float(t))
        except ValueError:
            raise FormatError(f"{source}:{lineno}: cannot parse value {t!r}") from None
    return np.array(vals)


def read_vec(path):
    with open(path, encoding="utf-8") as fh:
        return parse_vec(fh.read(), str(path))


def write_vec(path, v):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"vec {len(v)}\n" + "\n".join(repr(float(x)) for x in v) + "\n")


def _render(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "NaN"
        if math.isinf(v):
            return "Infinity" if v > 0 else "-Infinity"
        text = format(v, ".17g")
        return text if any(c in text for c in ".e") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}"{k}": {_render(v, indent, level + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj):
            return "[" + ", ".join(_render(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _render(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """JSON text with every float written to 17 significant digits."""
    return _render(obj, indent, 0)
