"""Excursions of a walk between the two half-lines of a line through a cell.

For a point ``z`` inside a square cell, the slope-one line through the cell
centre carries lattice vertices only, and every walk edge meets it at a
vertex. The cell centre splits it into two half-lines; each stretch of the
walk from one half-line to the first visit of the other winds exactly half a
turn around the centre. On the triangular lattice the line is the one
carrying an edge ``s`` of the triangle containing ``z``, the half-lines are
the two rays beyond the endpoints of ``s``, and a stretch that ends by
walking along ``s`` gets weight 0.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace

import numba as nb
import numpy as np
from scipy import stats

from .lattice_walk import LatticeKind, ScaleParams, WalkPath, from_plane, step_set, to_plane
from .winding_core import winding_angle

TWO_PI = 2.0 * math.pi


class DegeneratePointError(ValueError):
    """The point lies on a lattice edge."""


class ExcursionClass(enum.Enum):
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class DiagonalFrame:
    """Reference geometry for excursions around ``z``.

    ``line_offset`` and ``split`` describe the line in lattice coordinates:
    square lattice, vertices with ``y - x == line_offset``, positive side
    ``x >= split + 1``; triangular lattice, vertices with ``b == line_offset``,
    positive side ``a >= split + 1``. ``ref`` is the point the half-lines
    emanate from (cell centre, or midpoint of ``s``).
    """

    lattice: LatticeKind
    z: tuple
    z_hat: tuple
    ref: tuple
    line_offset: int
    split: int
    edge: tuple | None = None

    @property
    def tri(self) -> bool:
        return self.lattice is LatticeKind.TRIANGULAR

    @property
    def delta_plus(self):
        """(origin, direction) of the positive half-line, plane coordinates."""
        if self.tri:
            return self.ref, (1.0, 0.0)
        return self.ref, (1.0, 1.0)

    @property
    def delta_minus(self):
        if self.tri:
            return self.ref, (-1.0, 0.0)
        return self.ref, (-1.0, -1.0)

    def line_value(self, v: np.ndarray) -> np.ndarray:
        """Zero on the line, positive on the 'above' side."""
        v = np.asarray(v)
        if self.tri:
            return v[..., 1] - self.line_offset
        return v[..., 1] - v[..., 0] - self.line_offset

    def positive(self, v: np.ndarray) -> np.ndarray:
        """For vertices on the line: True on the positive half-line."""
        return np.asarray(v)[..., 0] >= self.split + 1


def build_frame(z, lattice=LatticeKind.SQUARE) -> DiagonalFrame:
    lattice = LatticeKind.parse(lattice)
    zx, zy = (z.real, z.imag) if isinstance(z, complex) else (float(z[0]), float(z[1]))
    if lattice is LatticeKind.SQUARE:
        if zx == math.floor(zx) or zy == math.floor(zy):
            raise DegeneratePointError(f"point {(zx, zy)} is on a lattice edge")
        cx, cy = math.floor(zx), math.floor(zy)
        hat = (cx + 0.5, cy + 0.5)
        return DiagonalFrame(lattice, (zx, zy), hat, hat, cy - cx, cx)
    za, zb = from_plane(lattice, np.array([zx, zy]))
    a0, r = math.floor(za), math.floor(zb)
    fa, fb = za - a0, zb - r
    if fa == 0 or fb == 0 or fa + fb == 1:
        raise DegeneratePointError(f"point {(zx, zy)} is on a lattice edge")
    if fa + fb < 1:
        tri_v = [(a0, r), (a0 + 1, r), (a0, r + 1)]
        bs = r
    else:
        tri_v = [(a0 + 1, r), (a0 + 1, r + 1), (a0, r + 1)]
        bs = r + 1
    hat = tuple(to_plane(lattice, np.mean(np.array(tri_v, dtype=float), axis=0)))
    ref = tuple(to_plane(lattice, np.array([a0 + 0.5, bs])))
    edge = ((a0, bs), (a0 + 1, bs))
    return DiagonalFrame(lattice, (zx, zy), hat, ref, bs, a0, edge)


@dataclass(frozen=True)
class Excursion:
    t_start: int
    t_end: int
    weight: float
    cls: ExcursionClass = ExcursionClass.UNCLASSIFIED


@dataclass(frozen=True)
class ExcursionSet:
    frame: DiagonalFrame
    excursions: tuple
    residual: float
    theta: float
    traversals: int = 0
    crossings: int | None = None
    medium_outer: int | None = None
    medium_inner: int | None = None
    escape_trials: int | None = None
    escape_successes: int | None = None

    @property
    def weight_sum(self) -> float:
        return float(sum(e.weight for e in self.excursions))

    @property
    def index(self) -> int:
        """Nearest integer to the walk's winding around ``z``, in turns."""
        return int(round(self.theta / TWO_PI))

    def count(self, cls: ExcursionClass) -> int:
        return sum(1 for e in self.excursions if e.cls is cls)

    def reflected(self) -> "ExcursionSet":
        """Weights negated, as for the walk reflected across the line."""
        return replace(
            self,
            excursions=tuple(replace(e, weight=-e.weight) for e in self.excursions),
            theta=-self.theta,
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "z": list(self.frame.z),
                "z_hat": list(self.frame.z_hat),
                "excursions": [[e.t_start, e.t_end, e.weight, e.cls.value] for e in self.excursions],
                "residual": self.residual,
                "crossings": self.crossings,
            }
        )


def _step_angles(path: WalkPath, point) -> np.ndarray:
    """Cumulative winding angle of the walk around ``point`` (plane coordinates)."""
    d = path.plane_vertices() - np.asarray(point, dtype=float)
    a, b = d[:-1], d[1:]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = (a * b).sum(axis=1)
    out = np.zeros(len(d))
    np.cumsum(np.arctan2(cross, dot), out=out[1:])
    return out


def excursion_times(path: WalkPath, frame: DiagonalFrame) -> np.ndarray:
    """Times ``e_0 < e_1 < ...`` of alternating visits to the two half-lines."""
    v = path.vertices
    hits = np.flatnonzero(frame.line_value(v) == 0)
    if len(hits) == 0:
        return hits
    side = frame.positive(v[hits])
    keep = np.ones(len(hits), dtype=bool)
    # a hit starts a new excursion only when it switches half-line
    keep[1:] = side[1:] != side[:-1]
    return hits[keep]


def decompose(path: WalkPath, frame: DiagonalFrame) -> ExcursionSet:
    if path.lattice is not frame.lattice:
        raise ValueError("path and frame are on different lattices")
    e = excursion_times(path, frame)
    v = path.vertices
    traversals = 0
    on_s = None
    if frame.tri:
        (pa, pb), (qa, qb) = frame.edge
        at_p = (v[:, 0] == pa) & (v[:, 1] == pb)
        at_q = (v[:, 0] == qa) & (v[:, 1] == qb)
        on_s = (at_p[:-1] & at_q[1:]) | (at_q[:-1] & at_p[1:])
        traversals = int(on_s.sum())
        # the reference point is the midpoint of s; angles across s are not needed
        safe = ~on_s
        d = path.plane_vertices() - np.asarray(frame.ref)
        a, b = d[:-1], d[1:]
        ang = np.where(safe, np.arctan2(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0], (a * b).sum(axis=1)), 0.0)
        cum = np.concatenate([[0.0], np.cumsum(ang)])
    else:
        cum = _step_angles(path, frame.ref)
    excursions = []
    for t0, t1 in zip(e[:-1], e[1:]):
        if frame.tri and on_s[t1 - 1]:
            w = 0.0
        else:
            raw = (cum[t1] - cum[t0]) / TWO_PI
            w = round(2 * raw) / 2
            if abs(raw - w) >= 0.1 or abs(w) != 0.5:
                raise AssertionError(f"excursion [{t0}, {t1}] has weight {raw}, expected +-1/2")
        excursions.append(Excursion(int(t0), int(t1), w))
    theta = winding_angle(path.plane_vertices(), frame.z)
    wsum = sum(x.weight for x in excursions)
    return ExcursionSet(
        frame=frame,
        excursions=tuple(excursions),
        residual=abs(theta / TWO_PI - wsum),
        theta=theta,
        traversals=traversals,
    )


@nb.njit(cache=True)
def _near_phase(d, lo, hi):
    """Indicator of ``[sigma_i, tau_i)``: entered ``B(lo)``, not yet left ``B(hi)``.

    Returns ``(near, crossings)`` where ``crossings`` counts the exits ``tau_i``.
    """
    near = np.zeros(d.shape[0], dtype=np.bool_)
    inside = False
    crossings = 0
    for t in range(d.shape[0]):
        if inside:
            if d[t] > hi:
                inside = False
                crossings += 1
        elif d[t] < lo:
            inside = True
        near[t] = inside
    return near, crossings


def classify(exset: ExcursionSet, params: ScaleParams, path: WalkPath) -> ExcursionSet:
    """Label each excursion small, medium or large.

    Small: starts within ``r_n`` of ``z``. Large: lies inside the far set,
    the complement of the times between entering ``B(z, 2 r_n)`` and next
    leaving ``B(z, 4 r_n)``, built from the walk itself. Medium: neither.
    """
    r = params.r_n
    d = np.hypot(*(path.plane_vertices() - np.asarray(exset.frame.z)).T)
    near, crossings = _near_phase(d, 2 * r, 4 * r)
    near_cum = np.concatenate([[0], np.cumsum(near)])
    out = []
    outer = inner = trials = successes = 0
    for e in exset.excursions:
        d0 = d[e.t_start]
        if d0 <= r:
            cls = ExcursionClass.SMALL
        elif near_cum[e.t_end + 1] - near_cum[e.t_start] == 0:
            cls = ExcursionClass.LARGE
        else:
            cls = ExcursionClass.MEDIUM
            if d0 > 8 * r:
                outer += 1
            else:
                inner += 1
        if r <= d0 <= 8 * r:
            trials += 1
            if d[e.t_start : e.t_end + 1].max() > 11 * r:
                successes += 1
        out.append(replace(e, cls=cls))
    return replace(
        exset,
        excursions=tuple(out),
        crossings=int(crossings),
        medium_outer=outer,
        medium_inner=inner,
        escape_trials=trials,
        escape_successes=successes,
    )


@dataclass(frozen=True)
class SymmetryStats:
    plus: int
    minus: int
    zero: int
    by_class: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return self.plus + self.minus + self.zero

    @property
    def mean(self) -> float:
        return 0.5 * (self.plus - self.minus) / self.count if self.count else 0.0

    @property
    def stderr(self) -> float:
        """Standard error of the mean weight."""
        n = self.count
        if n < 2:
            return float("nan")
        m = self.mean
        second = 0.25 * (self.plus + self.minus) / n
        var = (second - m * m) * n / (n - 1)
        return math.sqrt(max(var, 0.0) / n)

    @property
    def p_value(self) -> float:
        """Two-sided binomial test of ``P(+1/2) = P(-1/2)``."""
        k = self.plus + self.minus
        if k == 0:
            return 1.0
        return float(stats.binomtest(self.plus, k, 0.5).pvalue)


def weight_symmetry_stats(samples) -> SymmetryStats:
    plus = minus = zero = 0
    by_class: dict = {}
    for exset in samples:
        for e in exset.excursions:
            slot = by_class.setdefault(e.cls.value, [0, 0, 0])
            if e.weight > 0:
                plus += 1
                slot[0] += 1
            elif e.weight < 0:
                minus += 1
                slot[1] += 1
            else:
                zero += 1
                slot[2] += 1
    return SymmetryStats(plus, minus, zero, {k: tuple(v) for k, v in by_class.items()})


# Streaming census used by the Monte Carlo experiments. Fields of the result:
CENSUS_FIELDS = (
    "excursions",
    "plus",
    "minus",
    "zero",
    "small",
    "medium",
    "large",
    "medium_outer",
    "medium_inner",
    "crossings",
    "escape_trials",
    "escape_successes",
    "weight_sum_small",
    "weight_sum_medium",
    "weight_sum_large",
    "traversals",
)


@nb.njit(cache=True)
def _census_kernel(codes, steps, tri, zx, zy, line_offset, split, sa, sb, r):
    """One pass over a walk given by step codes; see ``CENSUS_FIELDS``.

    Weights use the side of the line the walk approaches the new half-line
    from: arriving from above after leaving the positive half-line, or from
    below after leaving the negative one, is counter-clockwise.
    """
    out = np.zeros(16)
    a = 0
    b = 0
    r2 = r * r
    lo2 = 4.0 * r2
    hi2 = 16.0 * r2
    in_near = False
    cur_side = 0  # 0: no excursion started yet; +1 / -1 side of the last e_i
    start_d2 = 0.0
    touched = False
    max_d2 = 0.0
    prev_above = 0.0
    for t in range(codes.shape[0] + 1):
        trav = False
        if t > 0:
            c = codes[t - 1]
            pa = a
            pb = b
            a += steps[c, 0]
            b += steps[c, 1]
            if tri and pb == sb and b == sb and ((pa == sa and a == sa + 1) or (pa == sa + 1 and a == sa)):
                trav = True
                out[15] += 1
        if tri:
            x = a + 0.5 * b
            y = 0.8660254037844386 * b
            lv = b - line_offset
        else:
            x = float(a)
            y = float(b)
            lv = (b - a) - line_offset
        d2 = (x - zx) * (x - zx) + (y - zy) * (y - zy)
        # far set bookkeeping (state at time t)
        if in_near:
            if d2 > hi2:
                in_near = False
                out[9] += 1
        elif d2 < lo2:
            in_near = True
        if in_near:
            touched = True
        if d2 > max_d2:
            max_d2 = d2
        if lv == 0:
            side = 1 if a >= split + 1 else -1
            if cur_side == 0 or side != cur_side:
                if cur_side != 0:
                    # close the excursion that started at the last e_i
                    if trav:
                        w = 0.0
                        out[3] += 1
                    else:
                        above = prev_above > 0
                        ccw = (cur_side > 0) == above
                        w = 0.5 if ccw else -0.5
                        if ccw:
                            out[1] += 1
                        else:
                            out[2] += 1
                    out[0] += 1
                    if start_d2 <= r2:
                        out[4] += 1
                        out[12] += w
                    elif not touched:
                        out[6] += 1
                        out[14] += w
                    else:
                        out[5] += 1
                        out[13] += w
                        if start_d2 > 64.0 * r2:
                            out[7] += 1
                        else:
                            out[8] += 1
                    if r2 <= start_d2 <= 64.0 * r2:
                        out[10] += 1
                        if max_d2 > 121.0 * r2:
                            out[11] += 1
                cur_side = side
                start_d2 = d2
                touched = in_near
                max_d2 = d2
        else:
            prev_above = lv
    return out


def census_array(codes: np.ndarray, frame: DiagonalFrame, params: ScaleParams) -> np.ndarray:
    """:func:`census` as a float array ordered like ``CENSUS_FIELDS``."""
    steps = step_set(frame.lattice)
    sa, sb = frame.edge[0] if frame.tri else (0, 0)
    return _census_kernel(
        np.ascontiguousarray(codes, dtype=np.uint8),
        steps,
        frame.tri,
        frame.z[0],
        frame.z[1],
        frame.line_offset,
        frame.split,
        sa,
        sb,
        params.r_n,
    )


def census(codes: np.ndarray, frame: DiagonalFrame, params: ScaleParams) -> dict:
    """Excursion statistics of the walk with the given step codes.

    Equivalent to ``classify(decompose(...))`` followed by counting, in one
    compiled pass and without storing the walk.
    """
    return dict(zip(CENSUS_FIELDS, census_array(codes, frame, params).tolist()))
