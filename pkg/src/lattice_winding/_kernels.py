"""Compiled inner loops shared by the winding, excursion and experiment code.

All kernels work in lattice (basis) coordinates. ``tri`` selects the
triangular lattice; on it the boundary between two triangles of a strip is
indexed by position ``2X`` (edge ``a = X``) or ``2X + 1`` (anti-diagonal edge
from ``(X + 1, r)`` to ``(X, r + 1)``), and triangle ``up(a)`` / ``down(a)``
sits at position ``2a`` / ``2a + 1``. On the square lattice position ``X`` is
the edge ``x = X`` and cell ``c`` sits at position ``c``. Cell ``q`` lies
between boundaries ``q`` and ``q + 1``.
"""
from __future__ import annotations

import math

import numba as nb
import numpy as np

TWO_PI = 2.0 * math.pi
SQRT3_2 = math.sqrt(3.0) / 2.0


@nb.njit(cache=True)
def _edge_event(a0, b0, a1, b1, tri):
    """(row, boundary position, sign) of a step, or row = INT_MIN if horizontal."""
    db = b1 - b0
    if db == 0:
        return -(1 << 62), 0, 0
    row = b0 if db > 0 else b1
    if tri:
        da = a1 - a0
        if da == 0:
            p = 2 * a0
        else:
            # anti-diagonal; lower endpoint (X + 1, row)
            la = a0 if db > 0 else a1
            p = 2 * la - 1
    else:
        p = a0
    return row, p, db


@nb.njit(cache=True)
def _floor_div(num, den):
    # den > 0
    return num // den


@nb.njit(cache=True)
def _ceil_div(num, den):
    return -((-num) // den)


@nb.njit(cache=True)
def _west_area(q, r, tri, xl, yl, xu, yu):
    """Area (basis units) of cell ``q`` of row ``r`` lying west of the chord line.

    The chord runs from ``(xl, yl)`` up to ``(xu, yu)``. The integrand is
    piecewise linear in the height, so the trapezoid rule on its breakpoints
    is exact.
    """
    dy = yu - yl
    k = (xu - xl) / dy
    xc0 = xl + (r - yl) * k
    if tri:
        a = q // 2
        if q % 2 == 0:
            l0, ls, r0, rs = float(a), 0.0, float(a + 1), -1.0
        else:
            l0, ls, r0, rs = float(a + 1), -1.0, float(a + 1), 0.0
    else:
        l0, ls, r0, rs = float(q), 0.0, float(q + 1), 0.0
    u0 = xc0 - l0
    us = k - ls
    w0 = r0 - l0
    ws = rs - ls
    pts = np.empty(4)
    pts[0] = 0.0
    pts[1] = 1.0
    npt = 2
    if us != 0.0:
        t = -u0 / us
        if 0.0 < t < 1.0:
            pts[npt] = t
            npt += 1
    if us - ws != 0.0:
        t = (w0 - u0) / (us - ws)
        if 0.0 < t < 1.0:
            pts[npt] = t
            npt += 1
    pts = np.sort(pts[:npt])
    total = 0.0
    prev_t = pts[0]
    prev_f = min(max(u0 + us * prev_t, 0.0), w0 + ws * prev_t)
    for i in range(1, npt):
        t = pts[i]
        f = min(max(u0 + us * t, 0.0), max(w0 + ws * t, 0.0))
        total += 0.5 * (f + prev_f) * (t - prev_t)
        prev_t = t
        prev_f = f
    return total


@nb.njit(cache=True)
def sweep_totals(verts, tri, hist_half):
    """Exact strip sweep of a closed loop (walk plus chord back to the start).

    Returns ``(total_abs, signed, whole_abs, hist)`` where ``total_abs`` is
    the integral of ``|index|`` and ``signed`` of ``index`` (basis area units),
    ``whole_abs`` the integer-cell part of ``total_abs`` in cell units, and
    ``hist[k + hist_half]`` the area with index ``k`` (clipped to the array).
    """
    n = verts.shape[0] - 1
    cell_area = 0.5 if tri else 1.0
    hist = np.zeros(2 * hist_half + 1)
    # chord from the end (x_e, y_e) to the start (x_s, y_s)
    xe, ye = verts[n, 0], verts[n, 1]
    xs, ys = verts[0, 0], verts[0, 1]
    if ys > ye:
        xl, yl, xu, yu, sc = xe, ye, xs, ys, 1
    else:
        xl, yl, xu, yu, sc = xs, ys, xe, ye, -1
    nchord = yu - yl

    # pass 1: row range and counts
    rmin = 1 << 62
    rmax = -(1 << 62)
    nev = 0
    for i in range(n):
        row, p, s = _edge_event(verts[i, 0], verts[i, 1], verts[i + 1, 0], verts[i + 1, 1], tri)
        if s != 0:
            nev += 1
            if row < rmin:
                rmin = row
            if row > rmax:
                rmax = row
    if nchord > 0:
        if yl < rmin:
            rmin = yl
        if yu - 1 > rmax:
            rmax = yu - 1
    if nev == 0 and nchord == 0:
        return 0.0, 0.0, 0, hist
    nrows = rmax - rmin + 1
    counts = np.zeros(nrows + 1, dtype=np.int64)
    for i in range(n):
        row, p, s = _edge_event(verts[i, 0], verts[i, 1], verts[i + 1, 0], verts[i + 1, 1], tri)
        if s != 0:
            counts[row - rmin + 1] += 1
    # chord candidate ranges per row
    cand_lo = np.zeros(nrows, dtype=np.int64)
    cand_hi = np.zeros(nrows, dtype=np.int64)
    has_chord = np.zeros(nrows, dtype=np.bool_)
    dxc = xu - xl
    for r in range(yl, yu):
        # chord x at the strip's bottom and top, as floor/ceil of rationals
        n0 = xl * nchord + (r - yl) * dxc
        n1 = n0 + dxc
        lo = min(n0, n1)
        hi = max(n0, n1)
        xlo = _floor_div(lo, nchord) - 1
        xhi = _ceil_div(hi, nchord)
        ri = r - rmin
        has_chord[ri] = True
        if tri:
            cand_lo[ri] = 2 * xlo
            cand_hi[ri] = 2 * xhi + 1
        else:
            cand_lo[ri] = xlo
            cand_hi[ri] = xhi
        counts[ri + 1] += 1
    for i in range(nrows):
        counts[i + 1] += counts[i]
    fill = counts[:-1].copy()
    keys = np.empty(counts[nrows], dtype=np.int64)
    # pack (p, sign) as 2 * p + (sign > 0); p may be negative
    for i in range(n):
        row, p, s = _edge_event(verts[i, 0], verts[i, 1], verts[i + 1, 0], verts[i + 1, 1], tri)
        if s != 0:
            ri = row - rmin
            keys[fill[ri]] = 2 * p + (1 if s > 0 else 0)
            fill[ri] += 1
    for ri in range(nrows):
        if has_chord[ri]:
            keys[fill[ri]] = 2 * cand_lo[ri] + (1 if sc > 0 else 0)
            fill[ri] += 1

    total = 0.0
    signed = 0.0
    whole = 0
    for ri in range(nrows):
        i0 = counts[ri]
        i1 = counts[ri + 1]
        if i1 == i0:
            continue
        seg = np.sort(keys[i0:i1])
        m = i1 - i0
        ps = np.empty(m, dtype=np.int64)
        suffix = np.empty(m + 1, dtype=np.int64)  # suffix[j] = sum of signs of seg[j:]
        suffix[m] = 0
        for j in range(m):
            ps[j] = seg[j] >> 1
        for j in range(m - 1, -1, -1):
            s = 1 if (seg[j] & 1) else -1
            suffix[j] = suffix[j + 1] + s
        # cells strictly between consecutive boundaries
        for j in range(1, m):
            cnt = ps[j] - ps[j - 1]
            if cnt == 0:
                continue
            v = suffix[j]
            if v != 0:
                av = v if v > 0 else -v
                whole += av * cnt
                total += av * cnt * cell_area
                signed += v * cnt * cell_area
                if hist_half > 0:
                    kk = v + hist_half
                    if 0 <= kk < hist.shape[0]:
                        hist[kk] += cnt * cell_area
        if has_chord[ri]:
            r = ri + rmin
            for q in range(cand_lo[ri], cand_hi[ri] + 1):
                # walk-only index of cell q: signs at boundaries >= q + 1
                j = np.searchsorted(ps, q + 1)
                iw = suffix[j]
                west = _west_area(q, r, tri, float(xl), float(yl), float(xu), float(yu))
                east = cell_area - west
                iwest = iw + sc
                aw = iw if iw >= 0 else -iw
                awest = iwest if iwest >= 0 else -iwest
                # undo the whole-cell contribution counted above
                whole -= aw
                total += west * awest + east * aw - cell_area * aw
                signed += west * iwest + east * iw - cell_area * iw
                if hist_half > 0:
                    kk = iw + hist_half
                    if iw != 0 and 0 <= kk < hist.shape[0]:
                        hist[kk] -= cell_area - east
                    kk = iwest + hist_half
                    if iwest != 0 and 0 <= kk < hist.shape[0]:
                        hist[kk] += west
    return total, signed, whole, hist


@nb.njit(cache=True)
def crossing_index(verts, tri, za, zb):
    """Index of basis point ``(za, zb)`` w.r.t. the walk closed by its chord.

    Counts signed crossings of the ray towards ``+a``; ``zb`` must not be an
    integer. Returns ``(index, on_chord)``.
    """
    n = verts.shape[0] - 1
    idx = 0
    for i in range(n):
        a0 = verts[i, 0]
        b0 = verts[i, 1]
        a1 = verts[i + 1, 0]
        b1 = verts[i + 1, 1]
        if b0 == b1:
            continue
        lo = b0 if b0 < b1 else b1
        if not (lo < zb < lo + 1):
            continue
        # a at height zb along the edge
        ac = a0 + (zb - b0) * (a1 - a0) / (b1 - b0)
        if ac > za:
            idx += 1 if b1 > b0 else -1
    ae = verts[n, 0]
    be = verts[n, 1]
    a_s = verts[0, 0]
    b_s = verts[0, 1]
    on_chord = False
    if be != b_s:
        lo = min(be, b_s)
        hi = max(be, b_s)
        if lo < zb < hi:
            ac = ae + (zb - be) * (a_s - ae) / (b_s - be)
            if ac > za:
                idx += 1 if b_s > be else -1
            elif ac == za:
                on_chord = True
    return idx, on_chord


@nb.njit(cache=True)
def _plane_xy(a, b, tri):
    if tri:
        return a + 0.5 * b, SQRT3_2 * b
    return float(a), float(b)


@nb.njit(cache=True)
def open_winding_codes(codes, steps, tri, za, zb):
    """Continuous winding angle of the open walk with step ``codes`` around a point.

    The point is given in basis coordinates and must have non-integer ``zb``.
    The angle is ``psi(end) - psi(start)`` plus ``2 pi`` per net
    counter-clockwise crossing of the ray towards ``-a``.
    """
    a = 0
    b = 0
    turns = 0
    for i in range(codes.shape[0]):
        c = codes[i]
        na = a + steps[c, 0]
        nb_ = b + steps[c, 1]
        if nb_ != b:
            lo = b if b < nb_ else nb_
            if lo < zb < lo + 1:
                ac = a + (zb - b) * (na - a) / (nb_ - b)
                if ac < za:
                    # moving down across the left ray is counter-clockwise
                    turns += 1 if nb_ < b else -1
        a = na
        b = nb_
    zx, zy = _plane_xy(za, zb, tri)
    x0, y0 = _plane_xy(0, 0, tri)
    x1, y1 = _plane_xy(a, b, tri)
    psi0 = math.atan2(y0 - zy, x0 - zx)
    psi1 = math.atan2(y1 - zy, x1 - zx)
    return psi1 - psi0 + TWO_PI * turns, a, b


@nb.njit(cache=True)
def walk_vertices(codes, steps):
    n = codes.shape[0]
    v = np.zeros((n + 1, 2), dtype=np.int64)
    for i in range(n):
        v[i + 1, 0] = v[i, 0] + steps[codes[i], 0]
        v[i + 1, 1] = v[i, 1] + steps[codes[i], 1]
    return v


@nb.njit(cache=True, fastmath=True, inline="always")
def _atan2_poly(y, x):
    """atan2 via Abramowitz & Stegun 4.4.49; absolute error below 1e-7."""
    ax = abs(x)
    ay = abs(y)
    mx = max(ax, ay)
    mn = min(ax, ay)
    t = mn / mx if mx > 0.0 else 0.0
    t2 = t * t
    p = 0.0028662257
    p = p * t2 - 0.0161657367
    p = p * t2 + 0.0429096138
    p = p * t2 - 0.0752896400
    p = p * t2 + 0.1065626393
    p = p * t2 - 0.1420889944
    p = p * t2 + 0.1999355085
    p = p * t2 - 0.3333314528
    r = t + t * t2 * p
    r = 0.5 * math.pi - r if ay > ax else r
    r = math.pi - r if x < 0.0 else r
    return -r if y < 0.0 else r


@nb.njit(cache=True, fastmath=True)
def _row_angles(px, py, xs, y, theta, dmin2, close):
    m = px.shape[0]
    nseg = m - 1 + (1 if close else 0)
    for s in range(nseg):
        e = s + 1 if s + 1 < m else 0
        ax0 = px[s]
        ay = py[s] - y
        bx0 = px[e]
        by = py[e] - y
        dx = bx0 - ax0
        dy = by - ay
        ll = dx * dx + dy * dy
        inv = 1.0 / ll if ll > 0.0 else 0.0
        walk = s + 1 < m
        for i in range(xs.shape[0]):
            ax = ax0 - xs[i]
            bx = bx0 - xs[i]
            t = -(ax * dx + ay * dy) * inv
            t = min(max(t, 0.0), 1.0)
            cx = ax + t * dx
            cy = ay + t * dy
            dmin2[i] = min(dmin2[i], cx * cx + cy * cy)
            if walk:
                theta[i] += _atan2_poly(ax * by - ay * bx, ax * bx + ay * by)


@nb.njit(cache=True)
def grid_abs_index(px, py, x0, y0, nx, ny, pitch, close):
    """Riemann sum of ``|round(theta / 2 pi)|`` over a regular grid.

    ``px, py`` is the walk polyline (plane coordinates); grid points are
    ``(x0 + (i + 1/2) pitch, y0 + (j + 1/2) pitch)``. Points closer than
    ``pitch / 2`` to the polyline, or to its closing segment when ``close``
    is set, are skipped. Returns ``(sum, n_skipped, max_abs_index)``.
    """
    half2 = 0.25 * pitch * pitch
    acc = 0.0
    skipped = 0
    maxabs = 0
    xs = np.empty(nx)
    for i in range(nx):
        xs[i] = x0 + (i + 0.5) * pitch
    theta = np.empty(nx)
    dmin2 = np.empty(nx)
    for j in range(ny):
        y = y0 + (j + 0.5) * pitch
        theta[:] = 0.0
        dmin2[:] = np.inf
        _row_angles(px, py, xs, y, theta, dmin2, close)
        for i in range(nx):
            if dmin2[i] < half2:
                skipped += 1
                continue
            k = int(round(theta[i] / TWO_PI))
            if k < 0:
                k = -k
            if k > maxabs:
                maxabs = k
            acc += k
    return acc * pitch * pitch, skipped, maxabs
