"""Nearest-neighbour random walks on the square and triangular lattices.

Walk vertices are stored as integer coordinates. On the square lattice these
are the usual ``(x, y)``; on the triangular lattice they are coordinates in
the basis ``(1, 0), (1/2, sqrt(3)/2)`` so that every vertex stays an integer
pair. :func:`to_plane` applies the Euclidean embedding when geometry needs it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class LatticeKind(enum.Enum):
    SQUARE = "square"
    TRIANGULAR = "triangular"

    @classmethod
    def parse(cls, value: "LatticeKind | str") -> "LatticeKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown lattice {value!r}; expected 'square' or 'triangular'") from None


# exp(i k pi/2), k = 0..3
SQUARE_STEPS = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=np.int64)
# exp(i k pi/3), k = 0..5, in the (a, b) basis
TRIANGULAR_STEPS = np.array(
    [[1, 0], [0, 1], [-1, 1], [-1, 0], [0, -1], [1, -1]], dtype=np.int64
)

SQRT3_2 = math.sqrt(3.0) / 2.0
# basis -> plane
_TRI_BASIS = np.array([[1.0, 0.0], [0.5, SQRT3_2]])


def step_set(lattice: LatticeKind) -> np.ndarray:
    """Integer step vectors of ``lattice`` (in its own coordinates)."""
    lattice = LatticeKind.parse(lattice)
    return SQUARE_STEPS if lattice is LatticeKind.SQUARE else TRIANGULAR_STEPS


def basis_matrix(lattice: LatticeKind) -> np.ndarray:
    """Matrix whose rows are the plane images of the two basis vectors."""
    lattice = LatticeKind.parse(lattice)
    return np.eye(2) if lattice is LatticeKind.SQUARE else _TRI_BASIS


def area_scale(lattice: LatticeKind) -> float:
    """Determinant of the basis map: plane area per unit of basis area."""
    return 1.0 if LatticeKind.parse(lattice) is LatticeKind.SQUARE else SQRT3_2


def to_plane(lattice: LatticeKind, coords) -> np.ndarray:
    """Map lattice coordinates (``(..., 2)`` array) to plane coordinates."""
    coords = np.asarray(coords, dtype=float)
    if LatticeKind.parse(lattice) is LatticeKind.SQUARE:
        return coords
    return coords @ _TRI_BASIS


def from_plane(lattice: LatticeKind, points) -> np.ndarray:
    """Inverse of :func:`to_plane`."""
    points = np.asarray(points, dtype=float)
    if LatticeKind.parse(lattice) is LatticeKind.SQUARE:
        return points
    b = points[..., 1] / SQRT3_2
    a = points[..., 0] - 0.5 * b
    return np.stack([a, b], axis=-1)


def step_covariance(lattice: LatticeKind) -> np.ndarray:
    """Covariance matrix of one uniform step, computed from the step set."""
    steps = to_plane(lattice, step_set(lattice))
    return steps.T @ steps / len(steps)


def step_variance(lattice: LatticeKind) -> float:
    """Per-coordinate step variance kappa (the covariance is kappa * I)."""
    cov = step_covariance(lattice)
    if not (np.isclose(cov[0, 1], 0.0) and np.isclose(cov[0, 0], cov[1, 1])):
        raise AssertionError(f"step covariance is not isotropic: {cov}")
    return float(cov[0, 0])


def derive_seed(master_seed: int, index: int, *more: int) -> int:
    """64-bit seed of the stream at ``(index, *more)`` under ``master_seed``.

    Built on :class:`numpy.random.SeedSequence` spawn keys, so streams for
    distinct keys do not overlap.
    """
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),) + tuple(int(i) for i in more))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True, eq=False)
class WalkPath:
    """An ``n``-step walk; ``vertices`` has shape ``(n + 1, 2)``, starting at 0."""

    lattice: LatticeKind
    vertices: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 1:
            raise ValueError("vertices must have shape (n + 1, 2)")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "lattice", LatticeKind.parse(self.lattice))

    @property
    def n(self) -> int:
        return len(self.vertices) - 1

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.vertices, axis=0)

    def plane_vertices(self) -> np.ndarray:
        return to_plane(self.lattice, self.vertices)

    def is_valid(self) -> bool:
        """Start at the origin and move by lattice steps only."""
        if self.vertices[0].any():
            return False
        if self.n == 0:
            return True
        steps = self.steps
        allowed = step_set(self.lattice)
        match = (steps[:, None, :] == allowed[None, :, :]).all(axis=2).any(axis=1)
        return bool(match.all())

    def __eq__(self, other):
        if not isinstance(other, WalkPath):
            return NotImplemented
        return self.lattice is other.lattice and np.array_equal(self.vertices, other.vertices)

    @classmethod
    def from_vertices(cls, lattice, vertices, seed=None) -> "WalkPath":
        """Build a walk from explicit vertices, checking the step invariant.

        The walk is translated so that it starts at the origin.
        """
        v = np.asarray(vertices, dtype=np.int64)
        v = v - v[0]
        path = cls(lattice, v, seed)
        if not path.is_valid():
            raise ValueError("consecutive vertices must differ by one lattice step")
        return path

    @classmethod
    def from_step_codes(cls, lattice, codes, seed=None) -> "WalkPath":
        lattice = LatticeKind.parse(lattice)
        codes = np.asarray(codes, dtype=np.intp)
        v = np.zeros((len(codes) + 1, 2), dtype=np.int64)
        np.cumsum(step_set(lattice)[codes], axis=0, out=v[1:])
        return cls(lattice, v, seed)


@dataclass(frozen=True, eq=False)
class ClosedLoop:
    """A walk closed by the straight chord from its last vertex back to 0."""

    path: WalkPath
    chord: tuple = field(init=False)

    def __post_init__(self):
        v = self.path.vertices
        object.__setattr__(self, "chord", (tuple(int(c) for c in v[-1]), tuple(int(c) for c in v[0])))

    @property
    def lattice(self) -> LatticeKind:
        return self.path.lattice

    @property
    def degenerate_chord(self) -> bool:
        return self.chord[0] == self.chord[1]

    def polygon(self) -> np.ndarray:
        """Lattice-coordinate vertices of the closed polygon (start repeated at the end)."""
        v = self.path.vertices
        if self.degenerate_chord:
            return v.copy()
        return np.vstack([v, v[:1]])

    def plane_polygon(self) -> np.ndarray:
        return to_plane(self.lattice, self.polygon())


@dataclass(frozen=True)
class ScaleParams:
    """Scale parameters of an ``n``-step walk.

    ``r_n = c0 ln n`` is the near-zone radius in lattice units. After dividing
    by ``sqrt(kappa n)`` it becomes ``c0 ln n / sqrt(kappa n)``, the rescaled
    strong-approximation radius up to a constant absorbed into ``c0``.
    """

    n: int
    kappa: float = 0.5
    c0: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kappa <= 0 or self.c0 <= 0:
            raise ValueError("kappa and c0 must be positive")

    @classmethod
    def for_lattice(cls, lattice, n: int, c0: float = 1.0) -> "ScaleParams":
        return cls(n=n, kappa=step_variance(lattice), c0=c0)

    @property
    def r_n(self) -> float:
        return self.c0 * math.log(self.n)

    @property
    def epsilon_n(self) -> float:
        """``r_n`` in rescaled units."""
        return self.r_n / math.sqrt(self.kappa * self.n)

    @property
    def rescale(self) -> float:
        """Lattice units per rescaled unit, ``sqrt(kappa n)``."""
        return math.sqrt(self.kappa * self.n)


def gen_step_codes(lattice, n: int, seed: int) -> np.ndarray:
    """Uniform i.i.d. step indices into :func:`step_set`, as ``uint8``."""
    if n < 1:
        raise ValueError("a walk needs n >= 1 steps")
    k = len(step_set(lattice))
    return make_rng(seed).integers(0, k, size=n, dtype=np.uint8)


def gen_walk(lattice, n: int, seed: int) -> WalkPath:
    """Simple random walk of ``n`` steps; same ``(lattice, n, seed)`` gives the same walk."""
    lattice = LatticeKind.parse(lattice)
    codes = gen_step_codes(lattice, n, seed)
    return WalkPath.from_step_codes(lattice, codes, seed=int(seed))


def close_loop(path: WalkPath) -> ClosedLoop:
    return ClosedLoop(path)
