"""Text serialization of labeled constellations.

The format is UTF-8 text::

    #4dshape v1 N=4 m=7 Es=2
    0.2875 0.473 ... | 0 1 1 0 0 0 1

one row per point, ``N`` coordinates then ``m`` bits after a ``|``.
"""
from __future__ import annotations

import os
import re
import tempfile
from pathlib import Path

import numpy as np

from .constellation import LabeledConstellation

__all__ = ["ConstellationParseError", "dumps", "loads", "save", "load", "atomic_write"]

_HEADER = re.compile(r"^#4dshape v1 N=(\d+) m=(\d+) Es=(\S+)\s*$")


class ConstellationParseError(ValueError):
    """Malformed constellation text; ``lineno`` is 1-based."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def dumps(c: LabeledConstellation) -> str:
    lines = [f"#4dshape v1 N={c.N} m={c.m} Es={c.mean_energy:.17g}"]
    for p, b in zip(c.points, c.labels):
        coords = " ".join(f"{x:.17g}" for x in p)
        bits = " ".join(str(int(v)) for v in b)
        lines.append(f"{coords} | {bits}")
    return "\n".join(lines) + "\n"


def loads(text: str, name: str = "") -> LabeledConstellation:
    raw = text.splitlines()
    if not raw:
        raise ConstellationParseError(1, "empty file")
    head = _HEADER.match(raw[0].strip())
    if head is None:
        raise ConstellationParseError(1, "expected '#4dshape v1 N=<int> m=<int> Es=<float>'")
    N, m = int(head.group(1)), int(head.group(2))
    try:
        float(head.group(3))
    except ValueError:
        raise ConstellationParseError(1, f"bad Es value {head.group(3)!r}") from None
    pts, labs = [], []
    for lineno, line in enumerate(raw[1:], start=2):
        if not line.strip():
            continue
        if line.count("|") != 1:
            raise ConstellationParseError(lineno, "expected exactly one '|' delimiter")
        left, right = line.split("|")
        try:
            coords = [float(x) for x in left.split()]
        except ValueError as exc:
            raise ConstellationParseError(lineno, f"bad coordinate ({exc})") from None
        bits = right.split()
        if len(coords) != N:
            raise ConstellationParseError(lineno, f"expected {N} coordinates, got {len(coords)}")
        if len(bits) != m or any(b not in ("0", "1") for b in bits):
            raise ConstellationParseError(lineno, f"expected {m} bits of 0/1")
        pts.append(coords)
        labs.append([int(b) for b in bits])
    if len(pts) != 1 << m:
        raise ConstellationParseError(len(raw), f"expected {1 << m} rows, got {len(pts)}")
    try:
        return LabeledConstellation(np.array(pts), np.array(labs, dtype=np.uint8), name)
    except ValueError as exc:
        raise ConstellationParseError(len(raw), str(exc)) from None


def atomic_write(path, data: str) -> None:
    """Write ``data`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save(c: LabeledConstellation, path) -> None:
    atomic_write(path, dumps(c))


def load(path) -> LabeledConstellation:
    p = Path(path)
    return loads(p.read_text(encoding="utf-8"), name=p.stem)
