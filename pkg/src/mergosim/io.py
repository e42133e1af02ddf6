"""File export: dense matrix files, CSV series, JSON and JSONL records.

Every writer goes through an atomic write-temp-then-rename so partial
files never appear under the target name. Numeric formatting uses
shortest round-trip reprs, which keeps outputs byte-stable for a fixed
input and seed.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Iterable, Sequence

import numpy as np


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix(path: str, matrix: np.ndarray, tag: str) -> None:
    """Dense complex matrix as rows of "re im" pairs under a
    "dim <n> tag <tag>" header."""
    mat = np.asarray(matrix, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("matrix must be square")
    lines = [f"dim {mat.shape[0]} tag {tag}"]
    for row in mat:
        lines.append(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_matrix(path: str) -> tuple[np.ndarray, str]:
    with open(path) as handle:
        header = handle.readline().split()
        if len(header) != 4 or header[0] != "dim" or header[2] != "tag":
            raise ValueError(f"malformed matrix header in {path}")
        n = int(header[1])
        tag = header[3]
        mat = np.zeros((n, n), dtype=complex)
        for i in range(n):
            parts = [float(x) for x in handle.readline().split()]
            if len(parts) != 2 * n:
                raise ValueError(f"row {i} of {path} has wrong width")
            mat[i] = np.array(parts[0::2]) + 1j * np.array(parts[1::2])
    return mat, tag


def write_csv(path: str, header: Sequence[str],
              rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_cell(x) for x in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def write_correlation_csv(path: str, times: np.ndarray,
                          values: np.ndarray) -> None:
    rows = [(float(t), float(c.real), float(c.imag))
            for t, c in zip(times, values)]
    write_csv(path, ["t_au", "re", "im"], rows)


def write_spectrum_csv(path: str, freqs: np.ndarray,
                       intensity: np.ndarray) -> None:
    rows = [(float(f), float(i)) for f, i in zip(freqs, intensity)]
    write_csv(path, ["freq_au", "intensity"], rows)


def write_json(path: str, payload) -> None:
    _atomic_write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def write_jsonl(path: str, records: Iterable[dict]) -> None:
    lines = [json.dumps(r, sort_keys=True) for r in records]
    _atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))
