"""Planar Brownian motion and bridge on [0, 1], and functionals of them.

Paths are sampled at times ``k / m``. Every path carries a seed; the samples
and any finer detail produced later by refinement near a point are drawn
from the same counter-based stream (see :mod:`._bm_kernels`), so a path is a
single well-defined object at every resolution.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _bm_kernels as K

TWO_PI = 2.0 * math.pi
EULER_GAMMA = 0.57721566490153286061


class PathKind(enum.Enum):
    MOTION = "motion"
    BRIDGE = "bridge"


class ResampleSignal(RuntimeError):
    """The point coincides with a sample of the (refined) path."""


@dataclass(frozen=True, eq=False)
class BMPath:
    """Samples at times ``k / m``, ``k = 0..m``, as an ``(m + 1, 2)`` array.

    ``seed`` is None for synthetic paths; those are never refined.
    """

    samples: np.ndarray
    kind: PathKind = PathKind.MOTION
    seed: int | None = None

    def __post_init__(self):
        s = np.ascontiguousarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != 2 or len(s) < 2:
            raise ValueError("samples must have shape (m + 1, 2) with m >= 1")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def m(self) -> int:
        return len(self.samples) - 1

    @property
    def dt(self) -> float:
        return 1.0 / self.m

    @property
    def closed(self) -> bool:
        return self.kind is PathKind.BRIDGE

    def _key(self):
        return _stream_key(self.seed, 1)


def _stream_key(seed: int, branch: int) -> np.uint64:
    # compiled functions hand uint64 back as Python ints; re-wrap each time
    base = np.uint64(K.path_key(np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)))
    return np.uint64(K.child_key(base, branch))


def _generate(m: int, seed: int, bridge: bool) -> BMPath:
    if m < 1:
        raise ValueError("m must be >= 1")
    key = _stream_key(seed, 0)
    xs, ys = K.gaussian_path(int(m), key, bridge)
    kind = PathKind.BRIDGE if bridge else PathKind.MOTION
    return BMPath(np.column_stack([xs, ys]), kind, int(seed) & 0xFFFFFFFFFFFFFFFF)


def gen_bm(m: int, seed: int) -> BMPath:
    """Brownian motion: ``m`` independent N(0, 1/m) steps per coordinate."""
    return _generate(m, seed, False)


def gen_bridge(m: int, seed: int) -> BMPath:
    """Brownian bridge ``beta_t - t beta_1`` built from the motion with the same seed."""
    return _generate(m, seed, True)


def synthetic_path(points, kind=PathKind.MOTION) -> BMPath:
    """Wrap a deterministic polyline so the functionals below accept it."""
    return BMPath(np.asarray(points, dtype=float), PathKind(kind))


def _point(z) -> tuple[float, float]:
    if isinstance(z, complex):
        return z.real, z.imag
    if np.isscalar(z):
        return float(z), 0.0
    return float(z[0]), float(z[1])


@dataclass(frozen=True)
class WindingAngle:
    angle: float
    refinements: int

    def __float__(self):
        return self.angle


def bm_winding_angle(path: BMPath, z, max_refine_depth: int = 12, closed: bool | None = None) -> WindingAngle:
    """Winding angle of the path around ``z``, refining segments close to ``z``.

    A segment is split by a bridge midpoint while ``z`` lies within
    ``max(segment length, 3 sqrt(duration))`` of it, at most
    ``max_refine_depth`` times. ``closed`` (default: bridges only) adds the
    chord from the last sample back to the first.
    """
    zx, zy = _point(z)
    s = path.samples
    depth = int(max_refine_depth) if path.seed is not None else 0
    key = path._key() if path.seed is not None else np.uint64(0)
    angle, splits, hit = K.polyline_angle(s[:, 0].copy(), s[:, 1].copy(), zx, zy, path.dt, key, depth)
    if hit:
        raise ResampleSignal(f"point {(zx, zy)} lies on the path")
    if closed is None:
        closed = path.closed
    if closed:
        a = s[-1] - (zx, zy)
        b = s[0] - (zx, zy)
        cross = a[0] * b[1] - a[1] * b[0]
        if cross == 0 and a @ b <= 0:
            raise ResampleSignal(f"point {(zx, zy)} lies on the closing chord")
        angle += math.atan2(cross, a @ b)
    return WindingAngle(float(angle), int(splits))


@dataclass(frozen=True)
class ClockValue:
    z: tuple
    epsilon: float
    value: float


def z_epsilon(path: BMPath, z, epsilon: float) -> ClockValue:
    """Square root of the Riemann sum of ``|beta_s - z|^-2`` over times outside ``B(z, eps)``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    zx, zy = _point(z)
    d2 = ((path.samples[:-1] - (zx, zy)) ** 2).sum(axis=1)
    outside = d2 >= epsilon * epsilon
    total = float(np.sum(1.0 / d2[outside])) / path.m
    return ClockValue((zx, zy), float(epsilon), math.sqrt(total))


def distance_to_path(path: BMPath, z, closed: bool | None = None) -> float:
    """Minimum distance from ``z`` to the sampled polyline (plus chord if closed)."""
    zx, zy = _point(z)
    p = path.samples - (zx, zy)
    if closed is None:
        closed = path.closed
    if closed:
        p = np.vstack([p, p[:1]])
    a, b = p[:-1], p[1:]
    d = b - a
    l2 = (d * d).sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(l2 > 0, -(a * d).sum(axis=1) / l2, 0.0)
    t = np.clip(t, 0.0, 1.0)
    q = a + t[:, None] * d
    return float(np.sqrt((q * q).sum(axis=1).min()))


def sausage_contains(
    path: BMPath,
    epsilon: float,
    z,
    closed: bool | None = None,
    refine: bool = False,
    resolve: float = 20.0,
    max_depth: int = 60,
) -> bool:
    """Whether ``z`` lies in the ``epsilon``-neighbourhood of the path.

    Without ``refine`` the sampled polyline is used. With it, segments
    that may pass within ``epsilon`` are refined by bridge midpoints until
    their duration is below ``(epsilon / resolve)**2``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if closed is None:
        closed = path.closed
    if not refine or path.seed is None:
        return distance_to_path(path, z, closed) <= epsilon
    zx, zy = _point(z)
    s = path.samples
    return bool(
        K.sausage_hit(s[:, 0].copy(), s[:, 1].copy(), path.dt, path._key(), zx, zy, float(epsilon), closed, resolve, max_depth)
    )


def hitting_time(path: BMPath, z, r: float) -> float | None:
    """First sample time ``k / m`` with ``|beta - z| <= r``; None if never."""
    if r <= 0:
        raise ValueError("r must be positive")
    zx, zy = _point(z)
    d2 = ((path.samples - (zx, zy)) ** 2).sum(axis=1)
    idx = np.flatnonzero(d2 <= r * r)
    return float(idx[0]) / path.m if len(idx) else None


def exit_time(path: BMPath, z, r: float) -> float | None:
    """First sample time ``k / m`` with ``|beta - z| > r``; None if never."""
    zx, zy = _point(z)
    d2 = ((path.samples - (zx, zy)) ** 2).sum(axis=1)
    idx = np.flatnonzero(d2 > r * r)
    return float(idx[0]) / path.m if len(idx) else None


def exp1(x: float) -> float:
    """Exponential integral ``E_1(x) = int_x^inf e^-t / t dt`` for ``x > 0``."""
    if x <= 0:
        raise ValueError("E_1 is defined here for x > 0 only")
    if x <= 1.0:
        # -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
        total = 0.0
        term = 1.0
        k = 1
        while True:
            term *= -x / k
            contrib = term / k
            total += contrib
            if abs(contrib) < 1e-17 * abs(total):
                break
            k += 1
        return -EULER_GAMMA - math.log(x) - total
    # continued fraction (modified Lentz)
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    i = 1
    while True:
        a = -i * i
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
        i += 1
    return h * math.exp(-x)


def p_integral_target(z) -> float:
    """``(1 / pi) int_0^1 p_s(0, z) ds`` with ``p_s`` the planar heat kernel.

    Substituting ``u = |z|^2 / 2s`` turns the integral into
    ``E_1(|z|^2 / 2) / (2 pi^2)``.
    """
    zx, zy = _point(z)
    r2 = zx * zx + zy * zy
    if r2 == 0:
        raise ValueError("the integral diverges at z = 0")
    if r2 / 2 > 700:
        return 0.0
    return exp1(r2 / 2.0) / (2.0 * math.pi**2)


def spitzer_target(z) -> float:
    """``pi int_0^1 p_s(0, z) ds = E_1(|z|^2 / 2) / 2``."""
    return math.pi**2 * p_integral_target(z)


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    count: int

    @property
    def ci(self) -> tuple[float, float]:
        return self.mean - 1.96 * self.stderr, self.mean + 1.96 * self.stderr


def _estimate(values) -> Estimate:
    v = np.asarray(values, dtype=float)
    if len(v) == 0:
        return Estimate(float("nan"), float("nan"), 0)
    se = float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else float("nan")
    return Estimate(float(v.mean()), se, len(v))


def winding_histogram(path: BMPath, ks, spacing: float = 0.05, max_depth: int = 300, shift=None) -> np.ndarray:
    """Grid counts of points whose winding angle lies in ``[2 pi k, 2 pi (k + 1))``.

    The grid has pitch ``spacing``, covers the path's bounding box and is
    offset by ``shift`` (two numbers in ``[0, 1)``, in units of the pitch).
    Synthetic paths are not refined.
    """
    ks = np.asarray(ks, dtype=np.int64)
    kmin, kmax = int(ks.min()), int(ks.max())
    s = path.samples
    if shift is None:
        shift = (0.5, 0.5)
    lo = s.min(axis=0) - 2 * spacing
    hi = s.max(axis=0) + 2 * spacing
    x0 = (math.floor(lo[0] / spacing) + shift[0]) * spacing
    y0 = (math.floor(lo[1] / spacing) + shift[1]) * spacing
    nx = int(math.ceil((hi[0] - x0) / spacing)) + 1
    ny = int(math.ceil((hi[1] - y0) / spacing)) + 1
    depth = int(max_depth) if path.seed is not None else 0
    key = path._key() if path.seed is not None else np.uint64(0)
    counts, _ = K.werner_counts(
        s[:, 0].copy(), s[:, 1].copy(), path.dt, key, x0, y0, spacing, nx, ny, kmin, kmax, depth
    )
    return counts[ks - kmin]


def werner_sample(path: BMPath, ks, spacing: float = 0.05, max_depth: int = 300, shift=None) -> np.ndarray:
    """``k^2`` times the grid estimate of the area with ``k`` turns, for each ``k``.

    The grid offset is drawn from the path's own seed unless given.
    """
    from .lattice_walk import make_rng

    ks = np.atleast_1d(np.asarray(ks, dtype=np.int64))
    if shift is None:
        shift = make_rng((path.seed or 0) ^ 0x5EED).random(2)
    counts = winding_histogram(path, ks, spacing, max_depth, shift)
    return counts * spacing * spacing * ks.astype(float) ** 2


def werner_area_estimate(k, paths, m: int | None = None, seed: int = 0, spacing: float = 0.05, max_depth: int = 300):
    """Estimate ``k^2 area{z : theta(z) in [2 pi k, 2 pi (k + 1))}`` over paths.

    ``paths`` is either an iterable of :class:`BMPath` or a number of paths to
    draw with resolution ``m`` from seeds derived from ``seed``. Each path's
    area is sampled on a randomly offset grid over its bounding box, one
    point per grid cell, which is unbiased for the area. ``k`` may be an
    integer or a sequence; the result is one :class:`Estimate` or a dict.
    """
    from .lattice_walk import derive_seed, make_rng

    single = np.isscalar(k)
    ks = np.atleast_1d(np.asarray(k, dtype=np.int64))
    if (ks < 1).any():
        raise ValueError("k must be >= 1")
    if isinstance(paths, (int, np.integer)):
        if m is None:
            raise ValueError("m is required when paths is a count")
        paths = (gen_bm(m, derive_seed(seed, i)) for i in range(int(paths)))
    rows = []
    for i, path in enumerate(paths):
        shift = None if path.seed is not None else make_rng(derive_seed(seed, i)).random(2)
        rows.append(werner_sample(path, ks, spacing, max_depth, shift))
    rows = np.array(rows).reshape(-1, len(ks))
    out = {int(kk): _estimate(rows[:, j]) for j, kk in enumerate(ks)}
    return out[int(ks[0])] if single else out


def spitzer_estimate(paths: int, epsilon: float, z=1.0, m: int = 1024, seed: int = 0, resolve: float = 20.0, max_depth: int = 60):
    """``|ln eps| P[z in W_eps]`` for the loop sausage of Brownian motion on [0, 1].

    Each path is sampled at resolution ``m`` and refined near ``z`` (see
    :func:`sausage_contains`). Returns an :class:`Estimate` of the scaled
    probability.
    """
    from .lattice_walk import derive_seed

    zx, zy = _point(z)
    seeds = np.array([derive_seed(seed, i) for i in range(int(paths))], dtype=np.uint64)
    hits = K.spitzer_batch(seeds, int(m), zx, zy, float(epsilon), float(resolve), int(max_depth))
    p = hits / paths
    scale = abs(math.log(epsilon))
    se = math.sqrt(p * (1 - p) / paths) if paths > 1 else float("nan")
    return Estimate(scale * p, scale * se, int(paths))
