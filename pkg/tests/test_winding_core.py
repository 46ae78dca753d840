import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattice_winding.lattice_walk import LatticeKind, WalkPath, close_loop, gen_walk, to_plane
from lattice_winding.winding_core import (
    IndexField,
    PointOnCurveError,
    index_field,
    index_histogram,
    loop_totals,
    point_index,
    sampling_slack,
    shoelace_area,
    total_winding,
    total_winding_sampled,
    winding_angle,
)

from conftest import FIXTURE_12, UNIT_SQUARE_CCW


def brute_index(polygon, pts):
    """Index of many points by summing subtended angles around a closed polygon."""
    p = np.asarray(polygon, dtype=float)
    if not np.array_equal(p[0], p[-1]):
        p = np.vstack([p, p[:1]])
    d = p[None, :, :] - np.asarray(pts, dtype=float)[:, None, :]
    a, b = d[:, :-1], d[:, 1:]
    ang = np.arctan2(a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0], (a * b).sum(axis=-1))
    return np.rint(ang.sum(axis=1) / (2 * math.pi)).astype(int)


def seg_dist(polygon, pts):
    p = np.asarray(polygon, dtype=float)
    p = np.vstack([p, p[:1]])
    a, b = p[:-1][None], p[1:][None]
    q = np.asarray(pts, dtype=float)[:, None, :]
    ab = b - a
    t = np.clip(((q - a) * ab).sum(-1) / np.maximum((ab * ab).sum(-1), 1e-300), 0, 1)
    c = a + t[..., None] * ab
    return np.sqrt(((q - c) ** 2).sum(-1)).min(axis=1)


def loop_of(vertices, lattice="square"):
    return close_loop(WalkPath.from_vertices(lattice, vertices))


def _in_convex(poly, pt):
    """Exact point-in-convex-polygon test (strict interior)."""
    x, y = map(Fraction, pt)
    signs = set()
    for (ax, ay), (bx, by) in zip(poly, poly[1:] + poly[:1]):
        c = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
        signs.add(c > 0 if c != 0 else None)
    return None not in signs and len(signs) == 1


def field_index_at(field: IndexField, z):
    """Index read from the field at a square-lattice point ``z``."""
    cell = (math.floor(z[0]), math.floor(z[1]))
    k = field.index_at_cell(cell)
    if k is not None:
        return k
    for piece in field.split_cells:
        if piece.cell == cell and _in_convex(list(piece.polygon), z):
            return piece.index
    raise AssertionError("point not located")


# -- winding_angle ---------------------------------------------------------


def test_winding_angle_unit_square():
    sq = UNIT_SQUARE_CCW.astype(float)
    assert winding_angle(sq, (0.5, 0.5)) == pytest.approx(2 * math.pi)
    assert winding_angle(sq, (5, 5)) == pytest.approx(0.0, abs=1e-12)
    assert winding_angle(sq[::-1], (0.5, 0.5)) == pytest.approx(-2 * math.pi)


def test_winding_angle_open_path_extended_precision():
    path = [(0.0, 0.0), (2.0, 0.0), (2.0, 3.0), (-1.0, 1.0)]
    z = (0.5, 0.5)
    mpmath.mp.dps = 50
    total = mpmath.mpf(0)
    for (ax, ay), (bx, by) in zip(path, path[1:]):
        ax, ay, bx, by = (mpmath.mpf(v) for v in (ax - z[0], ay - z[1], bx - z[0], by - z[1]))
        total += mpmath.atan2(ax * by - ay * bx, ax * bx + ay * by)
    assert winding_angle(path, z) == pytest.approx(float(total), abs=1e-12)


def test_winding_angle_point_on_curve():
    with pytest.raises(PointOnCurveError):
        winding_angle(UNIT_SQUARE_CCW, (0.5, 0.0))
    with pytest.raises(PointOnCurveError):
        winding_angle(UNIT_SQUARE_CCW, (1.0, 1.0))


# -- point_index -----------------------------------------------------------


def test_point_index_orientation(square_walk):
    loop = close_loop(square_walk)
    assert point_index(loop, (0.5, 0.5)) == 1
    cw = close_loop(WalkPath.from_vertices("square", UNIT_SQUARE_CCW[::-1]))
    assert point_index(cw, (0.5, 0.5)) == -1


def test_point_index_on_walk_edge_raises(fixture_walk):
    with pytest.raises(PointOnCurveError):
        point_index(close_loop(fixture_walk), (0.5, 0.0))


def test_point_index_chord_convention():
    # walk (0,0) -> (1,0) -> (1,1); the chord runs from (1,1) back to (0,0)
    loop = loop_of([(0, 0), (1, 0), (1, 1)])
    # on the chord the walk alone sweeps half a turn
    assert point_index(loop, (0.5, 0.5)) == 0
    assert point_index(loop, (0.75, 0.25)) == 1


def test_point_index_matches_field_on_fixture(fixture_walk):
    loop = close_loop(fixture_walk)
    field = index_field(loop)
    rng = np.random.default_rng(3)
    pts = rng.uniform((-1, -2), (4, 4), size=(100, 2))
    for z in pts:
        assert point_index(loop, z) == field_index_at(field, z)


def test_point_index_far_point_zero():
    for seed in range(20):
        w = gen_walk("square", 40, seed)
        loop = close_loop(w)
        assert point_index(loop, (41.5, 0.5)) == 0
        assert point_index(loop, (-0.5, -41.3)) == 0


@given(st.integers(0, 10**6), st.integers(-50, 50), st.integers(-50, 50))
@settings(max_examples=50, deadline=None)
def test_point_index_translation_invariant(seed, dx, dy):
    w = gen_walk("square", 30, seed)
    loop = close_loop(w)
    z = (0.37, 0.61)
    moved = WalkPath(LatticeKind.SQUARE, w.vertices + (dx, dy))
    # keep the translated vertices as-is (no re-centering)
    moved_loop = close_loop(moved)
    assert point_index(loop, z) == point_index(moved_loop, (z[0] + dx, z[1] + dy))


# -- index_field / total_winding ------------------------------------------


def test_field_unit_square(square_walk):
    field = index_field(close_loop(square_walk))
    assert field.cells == {(0, 0): 1}
    assert field.split_cells == ()
    assert field.signed_area == 1
    assert total_winding(field).rational == 1
    assert total_winding(field).value == 1.0
    assert index_histogram(field).areas == {1: 1.0}


def test_field_double_wound_square():
    verts = np.vstack([UNIT_SQUARE_CCW, UNIT_SQUARE_CCW[1:]])
    field = index_field(loop_of(verts))
    assert field.cells == {(0, 0): 2}
    assert total_winding(field).rational == 2
    assert index_histogram(field).areas == {2: 1.0}


def test_field_matches_brute_force_grid(fixture_walk):
    loop = close_loop(fixture_walk)
    field = index_field(loop)
    poly = loop.plane_polygon()
    h = 1 / 64
    xs = np.arange(-2, 5, h) + h / 2
    ys = np.arange(-2, 5, h) + h / 2
    X, Y = np.meshgrid(xs, ys)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    pts = pts[seg_dist(poly, pts) > 1 / 128]
    expected = brute_index(poly, pts)
    cells = np.floor(pts).astype(int)
    for (cx, cy) in {tuple(c) for c in cells}:
        mask = (cells[:, 0] == cx) & (cells[:, 1] == cy)
        k = field.index_at_cell((cx, cy))
        if k is None:
            for z, e in zip(pts[mask][::7], expected[mask][::7]):
                assert field_index_at(field, z) == e
        else:
            assert (expected[mask] == k).all(), (cx, cy)


def test_split_cell_areas_sum_to_cell(fixture_walk):
    field = index_field(close_loop(fixture_walk))
    assert field.split_cells
    by_cell = {}
    for piece in field.split_cells:
        by_cell[piece.cell] = by_cell.get(piece.cell, 0) + piece.area
    assert all(a == field.cell_area for a in by_cell.values())


def test_fixture_total_brackets_sampling(fixture_walk):
    loop = close_loop(fixture_walk)
    exact = total_winding(index_field(loop)).value
    sampled = total_winding_sampled(loop, 1 / 64)
    assert abs(sampled - exact) <= sampling_slack(loop, 1 / 64, 2)


def test_histogram_identities(fixture_walk):
    loop = close_loop(fixture_walk)
    field = index_field(loop)
    hist = index_histogram(field)
    assert 0 not in hist.basis_areas
    assert all(a > 0 for a in hist.basis_areas.values())
    assert sum(abs(k) * a for k, a in hist.basis_areas.items()) == total_winding(field).rational
    assert sum(k * a for k, a in hist.basis_areas.items()) == shoelace_area(loop)


def test_adjacent_cells_differ_by_edge_count():
    for seed in range(10):
        w = gen_walk("square", 60, seed)
        loop = close_loop(w)
        field = index_field(loop)
        v = w.vertices
        # signed count of vertical walk edges on the line x = c, row y
        up = {}
        edges = list(zip(v[:-1], v[1:]))
        if v[-1][0] == 0:
            # a vertical chord lies on a lattice line: count its unit pieces
            ys = range(int(v[-1][1]), 0, -1) if v[-1][1] > 0 else range(int(v[-1][1]), 0)
            edges += [((0, y), (0, y - 1 if v[-1][1] > 0 else y + 1)) for y in ys]
        for (x0, y0), (x1, y1) in edges:
            if x0 == x1:
                key = (int(x0), int(min(y0, y1)))
                up[key] = up.get(key, 0) + (1 if y1 > y0 else -1)
        split = {s.cell for s in field.split_cells}
        lo = v.min(axis=0) - 1
        hi = v.max(axis=0) + 1
        for cy in range(lo[1], hi[1]):
            for cx in range(lo[0], hi[0]):
                if (cx, cy) in split or (cx + 1, cy) in split:
                    continue
                left = field.cells.get((cx, cy), 0)
                right = field.cells.get((cx + 1, cy), 0)
                # crossing the shared edge rightwards loses its upward edges
                assert left - right == up.get((cx + 1, cy), 0)


def test_zero_area_loop():
    loop = loop_of([(0, 0), (1, 0), (2, 0), (1, 0), (0, 0)])
    assert total_winding(index_field(loop)).rational == 0
    assert total_winding_sampled(loop, 1 / 16) == 0.0
    # out and back with a chord lying on the walk
    loop = loop_of([(0, 0), (1, 0), (2, 0)])
    assert total_winding(index_field(loop)).rational == 0


def test_sampled_unit_square(square_walk):
    assert abs(total_winding_sampled(close_loop(square_walk), 1 / 16) - 1) <= 4 / 16


def _rot(v):
    return np.column_stack([-v[:, 1], v[:, 0]])


def test_rotation_permutes_field():
    for seed in range(15):
        w = gen_walk("square", 40, seed)
        f = index_field(close_loop(w))
        g = index_field(loop_of(_rot(w.vertices)))
        assert g.cells == {(-cy - 1, cx): k for (cx, cy), k in f.cells.items()}
        assert total_winding(f).rational == total_winding(g).rational


def test_reflection_negates_field():
    for seed in range(15):
        w = gen_walk("square", 40, seed)
        f = index_field(close_loop(w))
        r = w.vertices * (1, -1)
        g = index_field(loop_of(r))
        assert g.cells == {(cx, -cy - 1): -k for (cx, cy), k in f.cells.items()}
        assert g.signed_area == -f.signed_area


@given(st.integers(0, 2**32), st.integers(1, 60))
@settings(max_examples=80, deadline=None)
def test_shoelace_identity_random(seed, n):
    for lattice in ("square", "triangular"):
        loop = close_loop(gen_walk(lattice, n, seed))
        field = index_field(loop)
        assert field.weighted_sum(lambda k: k) == shoelace_area(loop) == field.signed_area


def test_triangular_field_against_sampling():
    for seed in range(20):
        loop = close_loop(gen_walk("triangular", 30, seed))
        field = index_field(loop)
        assert field.extension
        tw = total_winding(field)
        s = total_winding_sampled(loop, 1 / 64)
        kmax = max([abs(k) for k in field.cells.values()] + [1])
        assert abs(s - tw.value) <= sampling_slack(loop, 1 / 64, kmax)


def test_triangular_point_index_matches_brute():
    for seed in range(10):
        loop = close_loop(gen_walk("triangular", 25, seed))
        poly = loop.plane_polygon()
        rng = np.random.default_rng(seed)
        pts = rng.uniform(poly.min(axis=0) - 1, poly.max(axis=0) + 1, size=(200, 2))
        pts = pts[seg_dist(poly, pts) > 1e-6]
        expected = brute_index(poly, pts)
        got = [point_index(loop, z) for z in pts]
        assert list(expected) == got


def test_loop_totals_agree_with_exact():
    for lattice in ("square", "triangular"):
        for seed in range(20):
            w = gen_walk(lattice, 80, seed)
            loop = close_loop(w)
            field = index_field(loop)
            total, signed, _ = loop_totals(w.vertices, lattice)
            assert total == pytest.approx(total_winding(field).value, rel=1e-9, abs=1e-9)
            assert signed == pytest.approx(float(field.signed_area) * field.area_scale, abs=1e-9)


def test_field_json_roundtrip(fixture_walk):
    field = index_field(close_loop(fixture_walk))
    again = IndexField.from_json(field.to_json())
    assert again.cells == field.cells
    assert again.split_cells == field.split_cells
    assert again.signed_area == field.signed_area
    assert total_winding(again).rational == total_winding(field).rational


def test_triangular_area_units():
    # one up-triangle (0,0) -> (1,0) -> (0,1) has Euclidean area sqrt(3)/4
    loop = loop_of([(0, 0), (1, 0), (0, 1), (0, 0)], "triangular")
    tw = total_winding(index_field(loop))
    assert tw.value == pytest.approx(math.sqrt(3) / 4)
    pts = to_plane("triangular", np.array([[1 / 3, 1 / 3]]))
    assert point_index(loop, pts[0]) == 1
