"""Matrix Market I/O for dense real matrices ("array real general" flavor).

File layout::

    %%MatrixMarket matrix array real general
    % optional comment lines
    m n
    <m*n entries, one per line, in column-major order>

Values are written with 17 significant digits, which round-trips float64.
"""

from __future__ import annotations

import numpy as np

from .linalg import as_matrix

_HEADER = "%%MatrixMarket matrix array real general"


def write_matrix(a, path) -> None:
    """Write ``a`` to ``path`` in Matrix Market array format."""
    a = as_matrix(a)
    m, n = a.shape
    with open(path, "w", newline="") as fh:
        fh.write(_HEADER + "\n")
        fh.write(f"{m} {n}\n")
        for x in a.flatten(order="F"):
            fh.write(format(float(x), ".17g") + "\n")


def read_matrix(path) -> np.ndarray:
    """Read a Matrix Market "array real general" file written by :func:`write_matrix`."""
    with open(path, "r") as fh:
        header = fh.readline().strip()
        fields = header.lower().split()
        expected = _HEADER.lower().split()
        if len(fields) != 5 or fields[:3] != expected[:3] or fields[3] != "real" or fields[4] != "general":
            raise ValueError(f"unsupported MatrixMarket header: {header!r}")
        line = fh.readline()
        while line and line.lstrip().startswith("%"):
            line = fh.readline()
        try:
            m, n = (int(tok) for tok in line.split())
        except Exception as exc:
            raise ValueError(f"bad dimensions line: {line!r}") from exc
        values = []
        for raw in fh:
            raw = raw.strip()
            if not raw or raw.startswith("%"):
                continue
            values.append(float(raw))
    if len(values) != m * n:
        raise ValueError(f"expected {m * n} entries, found {len(values)}")
    return np.asarray(values, dtype=np.float64).reshape((m, n), order="F").copy(order="C")
