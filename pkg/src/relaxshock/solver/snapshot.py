"""Columnar float64 snapshots with a two-line UTF-8 header."""
import numpy as np

from .grid import FieldState

COLUMNS = ("xi1", "xi2", "xi3", "v", "u1", "u2", "u3",
           "pi11", "pi22", "pi33", "pi12", "pi13", "pi23", "pi2")


def write_snapshot(path, fields: FieldState, X: float = 0.0, Xdot: float = 0.0):
    g = fields.grid
    x1, x2, x3 = np.meshgrid(g.xi1, g.xi2, g.xi3, indexing="ij")
    cols = np.concatenate([np.stack([x1, x2, x3]), fields.q]).reshape(len(COLUMNS), -1)
    with open(path, "wb") as fh:
        fh.write((" ".join(COLUMNS) + "\n").encode("utf-8"))
        fh.write(f"{fields.t:.17g} {X:.17g} {Xdot:.17g}\n".encode("utf-8"))
        fh.write(cols.astype("<f8").tobytes(order="C"))


def read_snapshot(path):
    """Return ``(columns, (t, X, Xdot), data)`` with ``data`` of shape (14, ncells)."""
    with open(path, "rb") as fh:
        cols = fh.readline().decode("utf-8").split()
        t, X, Xdot = (float(s) for s in fh.readline().decode("utf-8").split())
        data = np.frombuffer(fh.read(), dtype="<f8").reshape(len(cols), -1)
    return cols, (t, X, Xdot), data
