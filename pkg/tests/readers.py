"""Readers for the sweep CSV and PGM outputs, used to check what was written."""

import csv
from pathlib import Path

import numpy as np


def load_grid_csv(path):
    """Read a file written by ``export_grid`` back into (coords, values)."""
    with Path(path).open(newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    header = rows[0]
    if len(rows) == 2 and "\\" not in header[0]:
        return (np.array(header[1:], dtype=float),), np.array(rows[1][1:], dtype=float)
    if "\\" in header[0]:
        cols = np.array(header[1:], dtype=float)
        body = np.array(rows[1:], dtype=float)
        return (body[:, 0], cols), body[:, 1:]
    data = np.array(rows[1:], dtype=float)
    axes = tuple(np.unique(data[:, i]) for i in range(3))
    values = data[:, 3].reshape(tuple(a.shape[0] for a in axes))
    return axes, values


def read_pgm(path):
    data = Path(path).read_bytes()
    magic, dims, maxval, rest = data.split(b"\n", 3)
    assert magic == b"P5" and maxval == b"255"
    cols, rows = (int(v) for v in dims.split())
    return np.frombuffer(rest, dtype=np.uint8, count=rows * cols).reshape(rows, cols)
