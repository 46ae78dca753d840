"""Winding angles, point indices and exact index fields of closed lattice loops.

The index of a point is constant on each component of the complement of the
loop. Every component of the complement of a lattice loop is a union of
lattice cells, except that the chord may cut cells in two. The exact field is
built strip by strip: inside the horizontal strip ``r < y < r + 1`` the index
of a cell is the signed count of loop edges met by a horizontal ray to its
right. Cells crossed by the chord are clipped into two convex pieces with
rational vertices.

Sign convention: counter-clockwise is positive.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .lattice_walk import (
    ClosedLoop,
    LatticeKind,
    WalkPath,
    area_scale,
    from_plane,
    to_plane,
)

__all__ = [
    "PointOnCurveError",
    "IndexField",
    "IndexHistogram",
    "SplitCell",
    "WindingTotal",
    "winding_angle",
    "point_index",
    "index_field",
    "total_winding",
    "total_winding_sampled",
    "sampling_slack",
    "index_histogram",
    "shoelace_area",
    "loop_totals",
]


class PointOnCurveError(ValueError):
    """The query point lies on the curve, where the index is undefined."""


def winding_angle(polyline, z) -> float:
    """Signed angle swept by ``polyline`` as seen from the plane point ``z``.

    Each segment contributes the angle it subtends, in ``(-pi, pi)``.
    """
    pts = np.asarray(polyline, dtype=float)
    zx, zy = float(np.real(z)) if np.iscomplexobj(z) else float(z[0]), (
        float(np.imag(z)) if np.iscomplexobj(z) else float(z[1])
    )
    d = pts - (zx, zy)
    a, b = d[:-1], d[1:]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1]
    if np.any((cross == 0.0) & (dot <= 0.0)):
        raise PointOnCurveError(f"point {(zx, zy)} lies on the curve")
    return float(np.arctan2(cross, dot).sum())


def _as_point(z) -> tuple[float, float]:
    if isinstance(z, complex):
        return z.real, z.imag
    return float(z[0]), float(z[1])


def _on_segment_exact(p, q, z) -> bool:
    """Is ``z`` on the open segment ``pq``? Exact for float inputs."""
    px, py = map(Fraction, p)
    qx, qy = map(Fraction, q)
    zx, zy = map(Fraction, z)
    cross = (qx - px) * (zy - py) - (qy - py) * (zx - px)
    if cross != 0:
        return False
    dot = (zx - px) * (qx - px) + (zy - py) * (qy - py)
    return 0 < dot < (qx - px) ** 2 + (qy - py) ** 2


def point_index(loop: ClosedLoop, z) -> int:
    """Index of the plane point ``z`` with respect to ``loop``.

    This is the nearest integer to the walk's winding angle over ``2 pi``.
    On the open chord the angle is an odd multiple of ``pi`` and the
    convention ``theta / 2 pi - 1/2`` is used instead.
    """
    z = _as_point(z)
    theta = winding_angle(loop.path.plane_vertices(), z)
    if not loop.degenerate_chord:
        if loop.lattice is LatticeKind.SQUARE:
            on_chord = _on_segment_exact(loop.chord[0], loop.chord[1], z)
        else:
            p, q = to_plane(loop.lattice, np.array(loop.chord, dtype=float))
            d = q - p
            w = np.asarray(z) - p
            cross = d[0] * w[1] - d[1] * w[0]
            t = (w @ d) / (d @ d)
            on_chord = abs(cross) <= 1e-12 * (d @ d) and 0 < t < 1
        if on_chord:
            half = theta / (2 * math.pi) - 0.5
            return int(round(half))
    return int(round(theta / (2 * math.pi)))


@dataclass(frozen=True)
class SplitCell:
    """One piece of a cell cut by the chord (basis coordinates, basis area)."""

    cell: tuple
    polygon: tuple
    area: Fraction
    index: int


@dataclass(frozen=True)
class WindingTotal:
    """An area given as ``rational`` (basis units) times ``scale``."""

    rational: Fraction
    scale: float

    @property
    def value(self) -> float:
        return float(self.rational) * self.scale

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class IndexField:
    lattice: LatticeKind
    cells: dict
    split_cells: tuple
    cell_area: Fraction
    signed_area: Fraction

    @property
    def area_scale(self) -> float:
        return area_scale(self.lattice)

    @property
    def extension(self) -> bool:
        """Triangular fields go beyond the square-lattice theorem."""
        return self.lattice is LatticeKind.TRIANGULAR

    def index_at_cell(self, cell) -> int | None:
        """Index of a whole cell, or None if the cell is split by the chord."""
        cell = tuple(cell)
        if cell in self._split_ids:
            return None
        return self.cells.get(cell, 0)

    @property
    def _split_ids(self) -> set:
        return {s.cell for s in self.split_cells}

    def weighted_sum(self, fn) -> Fraction:
        total = Fraction(0)
        for k in self.cells.values():
            total += fn(k) * self.cell_area
        for piece in self.split_cells:
            total += fn(piece.index) * piece.area
        return total

    def to_json(self) -> str:
        def frac(x):
            return f"{x.numerator}/{x.denominator}"

        return json.dumps(
            {
                "lattice": self.lattice.value,
                "cells": [[*c, k] for c, k in sorted(self.cells.items())],
                "split_cells": [
                    {
                        "cell": list(s.cell),
                        "polygon": [[frac(x), frac(y)] for x, y in s.polygon],
                        "area": frac(s.area),
                        "index": s.index,
                    }
                    for s in self.split_cells
                ],
                "cell_area": frac(self.cell_area),
                "signed_area": frac(self.signed_area),
                "area_scale": self.area_scale,
                "extension": self.extension,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "IndexField":
        d = json.loads(text)
        return cls(
            lattice=LatticeKind.parse(d["lattice"]),
            cells={tuple(c[:-1]): c[-1] for c in d["cells"]},
            split_cells=tuple(
                SplitCell(
                    tuple(s["cell"]),
                    tuple((Fraction(x), Fraction(y)) for x, y in s["polygon"]),
                    Fraction(s["area"]),
                    s["index"],
                )
                for s in d["split_cells"]
            ),
            cell_area=Fraction(d["cell_area"]),
            signed_area=Fraction(d["signed_area"]),
        )


@dataclass(frozen=True)
class IndexHistogram:
    """Area (basis units) of ``{index == k}`` for each nonzero ``k``."""

    lattice: LatticeKind
    basis_areas: dict = field(default_factory=dict)

    @property
    def areas(self) -> dict:
        s = area_scale(self.lattice)
        return {k: float(a) * s for k, a in sorted(self.basis_areas.items())}

    def __getitem__(self, k):
        return self.basis_areas[k]

    def __len__(self):
        return len(self.basis_areas)


def shoelace_area(loop: ClosedLoop) -> Fraction:
    """Signed area of the closed polygon, in basis units (exact)."""
    v = loop.polygon()
    x, y = v[:, 0].astype(object), v[:, 1].astype(object)
    twice = int(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1]))
    return Fraction(twice, 2)


def _edge_events(path: WalkPath):
    """Per-row lists of (boundary position, sign) for the walk's edges."""
    tri = path.lattice is LatticeKind.TRIANGULAR
    v = path.vertices
    a0, b0 = v[:-1, 0], v[:-1, 1]
    a1, b1 = v[1:, 0], v[1:, 1]
    db = b1 - b0
    mask = db != 0
    rows = np.minimum(b0, b1)[mask]
    signs = db[mask]
    if tri:
        da = (a1 - a0)[mask]
        low_a = np.where(db[mask] > 0, a0[mask], a1[mask])
        pos = np.where(da == 0, 2 * a0[mask], 2 * low_a - 1)
    else:
        pos = a0[mask]
    events: dict[int, list] = {}
    for r, p, s in zip(rows.tolist(), pos.tolist(), signs.tolist()):
        events.setdefault(r, []).append((p, s))
    return events


def _cell_polygon(q: int, r: int, tri: bool):
    if not tri:
        return [(q, r), (q + 1, r), (q + 1, r + 1), (q, r + 1)]
    a = q // 2
    if q % 2 == 0:
        return [(a, r), (a + 1, r), (a, r + 1)]
    return [(a + 1, r), (a + 1, r + 1), (a, r + 1)]


def _cell_id(q: int, r: int, tri: bool) -> tuple:
    return (q // 2, r, q % 2) if tri else (q, r)


def _poly_area(poly) -> Fraction:
    twice = Fraction(0)
    for (x0, y0), (x1, y1) in zip(poly, poly[1:] + poly[:1]):
        twice += x0 * y1 - x1 * y0
    return twice / 2


def _centroid(poly):
    a = _poly_area(poly)
    cx = cy = Fraction(0)
    for (x0, y0), (x1, y1) in zip(poly, poly[1:] + poly[:1]):
        c = x0 * y1 - x1 * y0
        cx += (x0 + x1) * c
        cy += (y0 + y1) * c
    return cx / (6 * a), cy / (6 * a)


def _clip(poly, h):
    """Part of convex ``poly`` where ``h(p) >= 0`` (Sutherland-Hodgman, one plane)."""
    out = []
    for p, q in zip(poly, poly[1:] + poly[:1]):
        hp, hq = h(p), h(q)
        if hp >= 0:
            out.append(p)
        if (hp > 0 > hq) or (hp < 0 < hq):
            t = hp / (hp - hq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    # drop repeated vertices
    clean = []
    for p in out:
        if not clean or clean[-1] != p:
            clean.append(p)
    if len(clean) > 1 and clean[0] == clean[-1]:
        clean.pop()
    return clean


def index_field(loop: ClosedLoop) -> IndexField:
    """Exact index of every cell (and chord-cut cell piece) of the plane."""
    tri = loop.lattice is LatticeKind.TRIANGULAR
    cell_area = Fraction(1, 2) if tri else Fraction(1)
    events = _edge_events(loop.path)

    (xe, ye), (xs, ys) = loop.chord
    chord_rows = {}
    if ye != ys:
        sc = 1 if ys > ye else -1
        (xl, yl), (xu, yu) = ((xe, ye), (xs, ys)) if ys > ye else ((xs, ys), (xe, ye))
        dyc, dxc = yu - yl, xu - xl

        def west(p):
            # > 0 strictly west of the chord line
            return -((p[0] - xl) * dyc - (p[1] - yl) * dxc)

        for r in range(yl, yu):
            x_bot = Fraction(xl * dyc + (r - yl) * dxc, dyc)
            x_top = x_bot + Fraction(dxc, dyc)
            lo = math.floor(min(x_bot, x_top)) - 1
            hi = math.ceil(max(x_bot, x_top))
            chord_rows[r] = (2 * lo, 2 * hi + 1) if tri else (lo, hi)

    cells: dict = {}
    split: list = []
    for r in sorted(set(events) | set(chord_rows)):
        row = sorted(events.get(r, []))
        ps = [p for p, _ in row]
        suffix = [0] * (len(row) + 1)
        for j in range(len(row) - 1, -1, -1):
            suffix[j] = suffix[j + 1] + row[j][1]
        cand = chord_rows.get(r)
        lo_q = min([ps[0]] if ps else []) if ps else cand[0]
        hi_q = ps[-1] if ps else cand[1]
        if cand:
            lo_q = min(lo_q, cand[0])
            hi_q = max(hi_q, cand[1])
        j = 0
        for q in range(lo_q - 1, hi_q + 1):
            while j < len(ps) and ps[j] < q + 1:
                j += 1
            iw = suffix[j]
            if cand and q < cand[0]:
                iw += sc
                if iw:
                    cells[_cell_id(q, r, tri)] = iw
                continue
            if cand and q <= cand[1]:
                poly = [(Fraction(x), Fraction(y)) for x, y in _cell_polygon(q, r, tri)]
                pieces = []
                for sign in (1, -1):
                    piece = _clip(poly, lambda p, s=sign: s * west(p))
                    if len(piece) >= 3:
                        area = _poly_area(piece)
                        if area > 0:
                            pieces.append(piece)
                if len(pieces) == 2:
                    for piece in pieces:
                        cen = _centroid(piece)
                        k = iw + (sc if west(cen) > 0 else 0)
                        split.append(SplitCell(_cell_id(q, r, tri), tuple(piece), _poly_area(piece), k))
                    continue
                cen = _centroid(poly)
                if west(cen) > 0:
                    iw += sc
            if iw:
                cells[_cell_id(q, r, tri)] = iw
    return IndexField(
        lattice=loop.lattice,
        cells=cells,
        split_cells=tuple(split),
        cell_area=cell_area,
        signed_area=shoelace_area(loop),
    )


def total_winding(field: IndexField) -> WindingTotal:
    """Integral of ``|index|`` over the plane."""
    return WindingTotal(field.weighted_sum(abs), field.area_scale)


def index_histogram(field: IndexField) -> IndexHistogram:
    areas: dict = {}
    for k in field.cells.values():
        areas[k] = areas.get(k, Fraction(0)) + field.cell_area
    for piece in field.split_cells:
        if piece.index:
            areas[piece.index] = areas.get(piece.index, Fraction(0)) + piece.area
    return IndexHistogram(field.lattice, dict(sorted(areas.items())))


def _plane_polyline(loop: ClosedLoop) -> np.ndarray:
    return np.ascontiguousarray(loop.path.plane_vertices())


def total_winding_sampled(loop: ClosedLoop, resolution: float) -> float:
    """Grid estimate of the integral of ``|index|`` (an oracle for the exact field).

    Sample points sit at the centres of a grid of pitch ``resolution``
    aligned with the integer plane coordinates; points within half a pitch
    of the loop are skipped.
    """
    value, _, _ = _sampled(loop, resolution)
    return value


def _sampled(loop: ClosedLoop, pitch: float):
    if pitch <= 0:
        raise ValueError("resolution must be positive")
    poly = _plane_polyline(loop)
    # the index vanishes outside the bounding box
    lo = np.floor(poly.min(axis=0))
    hi = np.ceil(poly.max(axis=0))
    nx, ny = (np.round((hi - lo) / pitch)).astype(int)
    return _kernels.grid_abs_index(
        poly[:, 0].copy(), poly[:, 1].copy(), lo[0], lo[1], nx, ny, pitch, not loop.degenerate_chord
    )


def sampling_slack(loop: ClosedLoop, resolution: float, max_abs_index: int) -> float:
    """Bound on ``|total_winding_sampled - total_winding|``.

    Only grid cells whose centre is within ``pitch / sqrt 2`` of a segment
    that can cut them are misattributed; these lie in a tube of radius
    ``sqrt(2) pitch``. Square-lattice walk edges lie on grid-cell boundaries,
    so only the chord counts there.
    """
    poly = loop.plane_polygon()
    seg = np.linalg.norm(np.diff(poly, axis=0), axis=1)
    if loop.lattice is LatticeKind.SQUARE:
        length = 0.0 if loop.degenerate_chord else float(seg[-1])
        if length == 0.0:
            return 0.0
    else:
        length = float(seg.sum())
    r = math.sqrt(2) * resolution
    return (max_abs_index + 1) * (2 * r * length + math.pi * r * r)


def loop_totals(vertices: np.ndarray, lattice=LatticeKind.SQUARE, hist_half: int = 0):
    """Fast float version of the exact sweep for large walks.

    Returns ``(total, signed, hist)`` in plane area units; ``hist[k + hist_half]``
    is the area with index ``k`` when ``hist_half > 0``.
    """
    lattice = LatticeKind.parse(lattice)
    tri = lattice is LatticeKind.TRIANGULAR
    total, signed, _, hist = _kernels.sweep_totals(np.ascontiguousarray(vertices, dtype=np.int64), tri, hist_half)
    s = area_scale(lattice)
    return total * s, signed * s, hist * s


def basis_point(lattice, z) -> tuple[float, float]:
    """Plane point to lattice coordinates."""
    a, b = from_plane(lattice, np.asarray(_as_point(z)))
    return float(a), float(b)
