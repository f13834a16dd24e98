"""Text format for tensor fields sampled on a grid (``*.tf``).

Layout::

    symten v1
    n=<int> m=<int> grid=<N1>x<N2>[x<N3>]
    <dim_sym(n, m) floats>      # one line per node, row-major node order

Components on each line follow the lexicographic order of sorted
multi-indices.  Floats are written with ``repr`` so values round-trip exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .symcore import dim_sym

MAGIC = "symten v1"
_HEADER = re.compile(r"^n=(\d+)\s+m=(\d+)\s+grid=(\d+(?:x\d+){1,2})$")


class TFFormatError(ValueError):
    """Malformed ``.tf`` content."""


@dataclass(frozen=True, eq=False)
class TFData:
    """Grid samples: ``values`` has shape grid + (dim_sym(n, m),)."""

    n: int
    m: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim not in (3, 4) or v.shape[-1] != dim_sym(self.n, self.m):
            raise ValueError(f"values must have shape grid + ({dim_sym(self.n, self.m)},) with 2 or 3 grid axes")
        object.__setattr__(self, "values", v)

    @property
    def grid(self) -> tuple[int, ...]:
        return self.values.shape[:-1]


def dumps(data: TFData) -> str:
    lines = [MAGIC, f"n={data.n} m={data.m} grid={'x'.join(str(k) for k in data.grid)}"]
    for row in data.values.reshape(-1, data.values.shape[-1]):
        lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def loads(text: str) -> TFData:
    lines = [ln.strip() for ln in text.splitlines()]
    while lines and not lines[-1]:
        lines.pop()
    if len(lines) < 2 or lines[0] != MAGIC:
        raise TFFormatError(f"first line must be {MAGIC!r}")
    match = _HEADER.match(lines[1])
    if not match:
        raise TFFormatError(f"bad header line {lines[1]!r}")
    n, m = int(match.group(1)), int(match.group(2))
    grid = tuple(int(k) for k in match.group(3).split("x"))
    if n < 1 or min(grid) < 1:
        raise TFFormatError("dimension and grid sizes must be positive")
    S = dim_sym(n, m)
    rows = lines[2:]
    count = int(np.prod(grid))
    if len(rows) != count:
        raise TFFormatError(f"expected {count} node lines, found {len(rows)}")
    vals = np.empty((count, S))
    for k, row in enumerate(rows):
        parts = row.split()
        if len(parts) != S:
            raise TFFormatError(f"node line {k + 3} has {len(parts)} values, expected {S}")
        try:
            vals[k] = [float(p) for p in parts]
        except ValueError as exc:
            raise TFFormatError(f"node line {k + 3}: {exc}") from None
    if not np.all(np.isfinite(vals)):
        raise TFFormatError("non-finite values")
    return TFData(n, m, vals.reshape(grid + (S,)))


def write_tf(path, data: TFData) -> None:
    Path(path).write_text(dumps(data))


def read_tf(path) -> TFData:
    return loads(Path(path).read_text())


__all__ = ["MAGIC", "TFData", "TFFormatError", "dumps", "loads", "read_tf", "write_tf"]
