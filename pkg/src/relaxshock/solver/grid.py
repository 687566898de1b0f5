"""Slab grid ``[-L, L] x T^2`` and packed field storage."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# packed component layout of FieldState.q
IV = 0
IU = slice(1, 4)
IPI1 = slice(4, 10)  # 11, 22, 33, 12, 13, 23
IPI2 = 10
NCOMP = 11
PI1_NAMES = ("pi11", "pi22", "pi33", "pi12", "pi13", "pi23")
# Pi1[a][b] -> packed index
SYM = ((4, 7, 8), (7, 5, 9), (8, 9, 6))


@dataclass(frozen=True)
class Grid:
    """Cell-centred grid; transverse period is 1 in both directions."""

    L: float
    N1: int
    N2: int = 1
    N3: int = 1

    def __post_init__(self):
        if self.L <= 0 or self.N1 < 16:
            raise ValueError("need L > 0 and N1 >= 16")
        if (self.N2 == 1) != (self.N3 == 1):
            raise ValueError("N2 and N3 must both be 1 (oneD) or both exceed 1 (threeD)")

    @property
    def mode(self) -> str:
        return "oneD" if self.N2 == 1 else "threeD"

    @property
    def shape(self):
        return (self.N1, self.N2, self.N3)

    @property
    def dx1(self) -> float:
        return 2.0 * self.L / self.N1

    @property
    def dx2(self) -> float:
        return 1.0 / self.N2

    @property
    def dx3(self) -> float:
        return 1.0 / self.N3

    @property
    def xi1(self):
        return -self.L + (np.arange(self.N1) + 0.5) * self.dx1

    @property
    def xi2(self):
        return (np.arange(self.N2) + 0.5) * self.dx2

    @property
    def xi3(self):
        return (np.arange(self.N3) + 0.5) * self.dx3

    def quadrature_weights_1(self):
        """Trapezoid weights along xi1 (half weight on the end nodes)."""
        w = np.full(self.N1, self.dx1)
        w[0] = w[-1] = 0.5 * self.dx1
        return w

    def integrate(self, f):
        """Trapezoid in xi1 times the (exact for periodic) rectangle rule in xi'."""
        f = np.asarray(f)
        w1 = self.quadrature_weights_1()
        col = f.sum(axis=(1, 2)) * (self.dx2 * self.dx3)
        return float(w1 @ col)


@dataclass
class FieldState:
    """Packed solution ``q`` of shape ``(11, N1, N2, N3)`` plus moving-frame time."""

    q: np.ndarray
    t: float = 0.0
    grid: Grid = field(default=None, repr=False)

    @classmethod
    def zeros(cls, grid: Grid):
        return cls(np.zeros((NCOMP,) + grid.shape), 0.0, grid)

    def copy(self):
        return FieldState(self.q.copy(), self.t, self.grid)

    @property
    def v(self):
        return self.q[IV]

    @property
    def u(self):
        return self.q[IU]

    @property
    def Pi1(self):
        return self.q[IPI1]

    @property
    def Pi2(self):
        return self.q[IPI2]

    def pi1_matrix(self):
        """Full ``(3, 3, N1, N2, N3)`` view-copy of the symmetric deviator."""
        return np.stack([np.stack([self.q[SYM[a][b]] for b in range(3)]) for a in range(3)])

    def trace_residual(self) -> float:
        """``max|tr Pi1| / max|Pi1|`` (0 when Pi1 vanishes)."""
        p = self.Pi1
        scale = float(np.max(np.abs(p)))
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(p[0] + p[1] + p[2]))) / scale
