"""Plain-text signal, distribution and sample files.

Signal/distribution file: first line ``n``, then exactly ``2^n`` lines with
one decimal real each, in index order. Sample file: first line ``n``, then
one integer in ``[0, 2^n)`` per line. Blank lines are not allowed except a
trailing newline.
"""

from __future__ import annotations

import hashlib
import os
from typing import Iterable

import numpy as np

from .walsh import MAX_FWHT_BITS, Distribution, RealSignal


class FileFormatError(ValueError):
    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


def _lines(path) -> list[str]:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _header(path, lines: list[str]) -> int:
    if not lines:
        raise FileFormatError(path, 1, "empty file, expected bit-width n on line 1")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise FileFormatError(path, 1, f"expected integer bit-width, got {lines[0]!r}") from None
    if not 1 <= n <= MAX_FWHT_BITS:
        raise FileFormatError(path, 1, f"bit-width {n} outside [1, {MAX_FWHT_BITS}]")
    return n


def read_values(path) -> tuple[int, np.ndarray]:
    lines = _lines(path)
    n = _header(path, lines)
    size = 1 << n
    body = lines[1:]
    if len(body) != size:
        line = len(lines) + 1 if len(body) < size else size + 2
        raise FileFormatError(path, line, f"expected {size} value lines for n={n}, found {len(body)}")
    values = np.empty(size)
    for i, raw in enumerate(body):
        try:
            v = float(raw.strip())
        except ValueError:
            raise FileFormatError(path, i + 2, f"not a decimal real: {raw!r}") from None
        if not np.isfinite(v):
            raise FileFormatError(path, i + 2, f"non-finite value {raw.strip()!r}")
        values[i] = v
    return n, values


def read_signal(path) -> RealSignal:
    n, values = read_values(path)
    return RealSignal(n, values)


def read_distribution(path) -> Distribution:
    n, values = read_values(path)
    try:
        return Distribution(n, values)
    except ValueError as exc:
        raise FileFormatError(path, 2, f"not a probability distribution: {exc}") from None


def read_samples(path) -> tuple[int, np.ndarray]:
    lines = _lines(path)
    n = _header(path, lines)
    size = 1 << n
    out = np.empty(len(lines) - 1, dtype=np.int64)
    for i, raw in enumerate(lines[1:]):
        try:
            v = int(raw.strip())
        except ValueError:
            raise FileFormatError(path, i + 2, f"not a decimal integer: {raw!r}") from None
        if not 0 <= v < size:
            raise FileFormatError(path, i + 2, f"sample {v} outside [0, {size})")
        out[i] = v
    return n, out


def format_real(v: float) -> str:
    # repr round-trips doubles exactly
    return repr(float(v))


def write_values(path_or_fh, n: int, values: Iterable[float]) -> None:
    text = "".join([f"{n}\n"] + [format_real(v) + "\n" for v in values])
    _emit(path_or_fh, text)


def write_samples(path_or_fh, n: int, samples: Iterable[int]) -> None:
    text = "".join([f"{n}\n"] + [f"{int(s)}\n" for s in samples])
    _emit(path_or_fh, text)


def _emit(path_or_fh, text: str) -> None:
    if hasattr(path_or_fh, "write"):
        path_or_fh.write(text)
        return
    with open(path_or_fh, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def describe_input(path) -> dict:
    return {"path": os.fspath(path), "sha256": sha256_file(path)}
