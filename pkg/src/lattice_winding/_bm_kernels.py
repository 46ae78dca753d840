"""Compiled kernels for Brownian paths refined by bridge midpoints.

A sampled path is refined near a point by inserting Brownian-bridge
midpoints. The Gaussian draws come from a counter-based hash keyed by the
path seed, the segment index and the dyadic address of the sub-segment, so
the refined path is one fixed path, whatever point it is viewed from and
however deep it is refined. All refinement runs in coordinates relative to
the point of interest, which keeps full relative precision at tiny scales.
"""
from __future__ import annotations

import math

import numba as nb
import numpy as np

TWO_PI = 2.0 * math.pi
# a bridge of duration dt strays more than SIGMAS * sqrt(dt) from its chord
# with probability about exp(-2 * SIGMAS**2) (1.5e-8 for 3)
SIGMAS = 3.0
_U64 = np.uint64


@nb.njit(cache=True, inline="always")
def splitmix64(x):
    x = x + _U64(0x9E3779B97F4A7C15)
    x = (x ^ (x >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> _U64(27))) * _U64(0x94D049BB133111EB)
    return x ^ (x >> _U64(31))


@nb.njit(cache=True, inline="always")
def child_key(key, branch):
    return splitmix64(key ^ (_U64(branch) * _U64(0xD6E8FEB86659FD93)))


@nb.njit(cache=True, inline="always")
def _unit(x):
    # 53 random bits in (0, 1]
    return ((x >> _U64(11)) + _U64(1)) * (1.0 / 9007199254740992.0)


@nb.njit(cache=True, inline="always")
def normal_pair(key):
    """Two independent standard normals from one key (Box-Muller)."""
    u = _unit(splitmix64(key))
    v = _unit(splitmix64(key ^ _U64(0x632BE59BD9B4E019)))
    r = math.sqrt(-2.0 * math.log(u))
    return r * math.cos(TWO_PI * v), r * math.sin(TWO_PI * v)


@nb.njit(cache=True, inline="always")
def _seg_dist2(ax, ay, bx, by):
    """Squared distance from the origin to segment ``[a, b]``."""
    dx = bx - ax
    dy = by - ay
    l2 = dx * dx + dy * dy
    t = 0.0
    if l2 > 0.0:
        t = -(ax * dx + ay * dy) / l2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    px = ax + t * dx
    py = ay + t * dy
    return px * px + py * py


@nb.njit(cache=True)
def make_stack(max_depth):
    """Work arrays for :func:`refined_segment_angle`; depth-first needs ``max_depth + 2`` slots."""
    cap = max_depth + 2
    return np.empty((5, cap)), np.empty(cap, dtype=np.uint64), np.empty(cap, dtype=np.int64)


@nb.njit(cache=True)
def refined_segment_angle(ax, ay, bx, by, dt, key, max_depth, stack):
    """Winding angle around the origin of a bridge from ``a`` to ``b`` over time ``dt``.

    Sub-segments are split while the origin is within
    ``max(length, SIGMAS * sqrt(dt))`` of them and the depth cap allows.
    Returns ``(angle, splits, hit)``; ``hit`` flags an endpoint landing on
    the origin exactly.
    """
    fl, skey, sdep = stack
    sx0 = fl[0]
    sy0 = fl[1]
    sx1 = fl[2]
    sy1 = fl[3]
    sdt = fl[4]
    top = 0
    sx0[0] = ax
    sy0[0] = ay
    sx1[0] = bx
    sy1[0] = by
    sdt[0] = dt
    skey[0] = key
    sdep[0] = 0
    total = 0.0
    splits = 0
    while top >= 0:
        x0 = sx0[top]
        y0 = sy0[top]
        x1 = sx1[top]
        y1 = sy1[top]
        h = sdt[top]
        k = skey[top]
        d = sdep[top]
        top -= 1
        if (x0 == 0.0 and y0 == 0.0) or (x1 == 0.0 and y1 == 0.0):
            return total, splits, True
        dx = x1 - x0
        dy = y1 - y0
        reach = max(dx * dx + dy * dy, SIGMAS * SIGMAS * h)
        if d < max_depth and _seg_dist2(x0, y0, x1, y1) < reach:
            g0, g1 = normal_pair(k)
            s = math.sqrt(0.25 * h)
            mx = 0.5 * (x0 + x1) + s * g0
            my = 0.5 * (y0 + y1) + s * g1
            splits += 1
            # right half pushed first so the left half is processed first
            top += 1
            sx0[top] = mx
            sy0[top] = my
            sx1[top] = x1
            sy1[top] = y1
            sdt[top] = 0.5 * h
            skey[top] = child_key(k, 2)
            sdep[top] = d + 1
            top += 1
            sx0[top] = x0
            sy0[top] = y0
            sx1[top] = mx
            sy1[top] = my
            sdt[top] = 0.5 * h
            skey[top] = child_key(k, 1)
            sdep[top] = d + 1
        else:
            total += math.atan2(x0 * y1 - y0 * x1, x0 * x1 + y0 * y1)
    return total, splits, False


@nb.njit(cache=True)
def polyline_angle(xs, ys, zx, zy, dt, seed_key, max_depth):
    """Winding angle of a sampled path around ``z`` with local refinement.

    Returns ``(angle, splits, hit)``.
    """
    total = 0.0
    splits = 0
    stack = make_stack(max_depth)
    for i in range(xs.shape[0] - 1):
        ax = xs[i] - zx
        ay = ys[i] - zy
        bx = xs[i + 1] - zx
        by = ys[i + 1] - zy
        if max_depth > 0:
            ang, sp, hit = refined_segment_angle(ax, ay, bx, by, dt, child_key(seed_key, i), max_depth, stack)
            if hit:
                return total, splits, True
            total += ang
            splits += sp
        else:
            if (ax == 0.0 and ay == 0.0) or (bx == 0.0 and by == 0.0):
                return total, splits, True
            total += math.atan2(ax * by - ay * bx, ax * bx + ay * by)
    return total, splits, False


@nb.njit(cache=True)
def werner_counts(xs, ys, dt, seed_key, x0, y0, h, nx, ny, kmin, kmax, max_depth):
    """Histogram of winding turns of a sampled path over a regular grid.

    Grid points are ``(x0 + i h, y0 + j h)``. The angle at each point is the
    angle of the path closed by its chord (an exact crossing count), minus
    the chord's own angle, plus ``2 pi`` times the extra turns made by the
    refined bridges of nearby segments. Returns ``counts[k - kmin]`` of
    points with angle in ``[2 pi k, 2 pi (k + 1))`` and the number of splits.
    """
    m = xs.shape[0] - 1
    npts = nx * ny
    turns = np.zeros(npts, dtype=np.int64)
    # 1. closed-loop index: signed crossings of the ray towards +x
    nseg = m + 1
    row_count = np.zeros(ny + 1, dtype=np.int64)
    for s in range(nseg):
        i0 = s
        i1 = s + 1 if s < m else 0
        ya = (ys[i0] - y0) / h
        yb = (ys[i1] - y0) / h
        # rows j with min <= j < max
        j0 = max(int(math.ceil(min(ya, yb))), 0)
        j1 = min(int(math.ceil(max(ya, yb))) - 1, ny - 1)
        for j in range(j0, j1 + 1):
            row_count[j + 1] += 1
    for j in range(ny):
        row_count[j + 1] += row_count[j]
    cx = np.empty(row_count[ny])
    cs = np.empty(row_count[ny], dtype=np.int64)
    fill = row_count[:ny].copy()
    for s in range(nseg):
        i0 = s
        i1 = s + 1 if s < m else 0
        ya = (ys[i0] - y0) / h
        yb = (ys[i1] - y0) / h
        # rows j with min <= j < max
        j0 = max(int(math.ceil(min(ya, yb))), 0)
        j1 = min(int(math.ceil(max(ya, yb))) - 1, ny - 1)
        for j in range(j0, j1 + 1):
            t = (j - ya) / (yb - ya)
            cx[fill[j]] = (xs[i0] + t * (xs[i1] - xs[i0]) - x0) / h
            cs[fill[j]] = 1 if yb > ya else -1
            fill[j] += 1
    for j in range(ny):
        a = row_count[j]
        b = row_count[j + 1]
        if a == b:
            continue
        order = np.argsort(cx[a:b])
        acc = 0
        for s in range(b - a):
            acc += cs[a + order[s]]
        # acc = sum of crossings right of x = -inf; peel off as x passes them
        p = 0
        for i in range(nx):
            while p < b - a and cx[a + order[p]] < i:
                acc -= cs[a + order[p]]
                p += 1
            turns[j * nx + i] = acc
    # 2. refinement corrections near the path
    splits = 0
    stack = make_stack(max_depth)
    for s in range(m):
        ax = xs[s]
        ay = ys[s]
        bx = xs[s + 1]
        by = ys[s + 1]
        ddx = bx - ax
        ddy = by - ay
        reach = math.sqrt(max(ddx * ddx + ddy * ddy, SIGMAS * SIGMAS * dt))
        i_lo = max(int(math.ceil((min(ax, bx) - reach - x0) / h)), 0)
        i_hi = min(int(math.floor((max(ax, bx) + reach - x0) / h)), nx - 1)
        j_lo = max(int(math.ceil((min(ay, by) - reach - y0) / h)), 0)
        j_hi = min(int(math.floor((max(ay, by) + reach - y0) / h)), ny - 1)
        if i_lo > i_hi or j_lo > j_hi:
            continue
        key = child_key(seed_key, s)
        for j in range(j_lo, j_hi + 1):
            zy = y0 + j * h
            for i in range(i_lo, i_hi + 1):
                zx = x0 + i * h
                px = ax - zx
                py = ay - zy
                qx = bx - zx
                qy = by - zy
                if _seg_dist2(px, py, qx, qy) >= reach * reach:
                    continue
                straight = math.atan2(px * qy - py * qx, px * qx + py * qy)
                ang, sp, hit = refined_segment_angle(px, py, qx, qy, dt, key, max_depth, stack)
                splits += sp
                turns[j * nx + i] += int(round((ang - straight) / TWO_PI))
    # 3. bin the open-path angle
    counts = np.zeros(kmax - kmin + 1, dtype=np.int64)
    ex = xs[m]
    ey = ys[m]
    sx = xs[0]
    sy = ys[0]
    for j in range(ny):
        zy = y0 + j * h
        for i in range(nx):
            zx = x0 + i * h
            px = ex - zx
            py = ey - zy
            qx = sx - zx
            qy = sy - zy
            chord = math.atan2(px * qy - py * qx, px * qx + py * qy)
            theta = TWO_PI * turns[j * nx + i] - chord
            k = int(math.floor(theta / TWO_PI))
            if kmin <= k <= kmax:
                counts[k - kmin] += 1
    return counts, splits


@nb.njit(cache=True)
def sausage_hit(xs, ys, dt, seed_key, zx, zy, eps, close, resolve, max_depth):
    """Whether the refined path (and optionally its chord) passes within ``eps`` of ``z``.

    Segments whose reach overlaps the disc are split until their duration
    satisfies ``sqrt(dt) < eps / resolve``, then judged as straight.
    """
    eps2 = eps * eps
    m = xs.shape[0] - 1
    if close:
        if _seg_dist2(xs[m] - zx, ys[m] - zy, xs[0] - zx, ys[0] - zy) <= eps2:
            return True
    cap = max_depth + 2
    sx0 = np.empty(cap)
    sy0 = np.empty(cap)
    sx1 = np.empty(cap)
    sy1 = np.empty(cap)
    sdt = np.empty(cap)
    skey = np.empty(cap, dtype=np.uint64)
    sdep = np.empty(cap, dtype=np.int64)
    fine = (eps / resolve) ** 2
    for s in range(m):
        ax = xs[s] - zx
        ay = ys[s] - zy
        bx = xs[s + 1] - zx
        by = ys[s + 1] - zy
        top = 0
        sx0[0] = ax
        sy0[0] = ay
        sx1[0] = bx
        sy1[0] = by
        sdt[0] = dt
        skey[0] = child_key(seed_key, s)
        sdep[0] = 0
        while top >= 0:
            x0 = sx0[top]
            y0 = sy0[top]
            x1 = sx1[top]
            y1 = sy1[top]
            hh = sdt[top]
            k = skey[top]
            d = sdep[top]
            top -= 1
            d2 = _seg_dist2(x0, y0, x1, y1)
            if d2 <= eps2:
                return True
            slack = eps + SIGMAS * math.sqrt(hh)
            if hh <= fine or d >= max_depth or d2 >= slack * slack:
                continue
            g0, g1 = normal_pair(k)
            sd = math.sqrt(0.25 * hh)
            mx = 0.5 * (x0 + x1) + sd * g0
            my = 0.5 * (y0 + y1) + sd * g1
            top += 1
            sx0[top] = mx
            sy0[top] = my
            sx1[top] = x1
            sy1[top] = y1
            sdt[top] = 0.5 * hh
            skey[top] = child_key(k, 2)
            sdep[top] = d + 1
            top += 1
            sx0[top] = x0
            sy0[top] = y0
            sx1[top] = mx
            sy1[top] = my
            sdt[top] = 0.5 * hh
            skey[top] = child_key(k, 1)
            sdep[top] = d + 1
    return False


@nb.njit(cache=True)
def gaussian_path(m, key, bridge):
    """Path of ``m`` Gaussian steps of variance ``1/m`` drawn from the hash stream."""
    xs = np.zeros(m + 1)
    ys = np.zeros(m + 1)
    s = math.sqrt(1.0 / m)
    for i in range(m):
        g0, g1 = normal_pair(child_key(key, i))
        xs[i + 1] = xs[i] + s * g0
        ys[i + 1] = ys[i] + s * g1
    if bridge:
        ex = xs[m]
        ey = ys[m]
        for i in range(m + 1):
            t = i / m
            xs[i] -= t * ex
            ys[i] -= t * ey
    return xs, ys


@nb.njit(cache=True)
def path_key(seed):
    return splitmix64(_U64(seed))


@nb.njit(cache=True)
def spitzer_batch(seeds, m, zx, zy, eps, resolve, max_depth):
    """Number of the paths with the given seeds whose loop sausage contains ``z``."""
    hits = 0
    dt = 1.0 / m
    for p in range(seeds.shape[0]):
        key = path_key(seeds[p])
        xs, ys = gaussian_path(m, child_key(key, 0), False)
        if sausage_hit(xs, ys, dt, child_key(key, 1), zx, zy, eps, True, resolve, max_depth):
            hits += 1
    return hits
