"""Lower bounds for random and averaged Dehn functions of Z^d.

A word is a sequence of generators of Z^d. Letter ``+i`` / ``-i`` stands for
``+e_i`` / ``-e_i`` (``i = 1..d``) and ``0`` for a lazy step that does not
move. The filling area of a word is bounded below by the total winding
number of its projection to the first two coordinates. Only that bound is
computed here, never an actual disc filling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .lattice_walk import LatticeKind, WalkPath, close_loop, derive_seed, make_rng
from .winding_core import index_field, loop_totals, total_winding


class ParityError(ValueError):
    """Closed walks on Z^2 have an even number of steps."""


@dataclass(frozen=True)
class Word:
    """Letters in ``{-d..d}``; the length counts lazy letters too."""

    letters: tuple
    d: int

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(c) for c in self.letters))
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if any(abs(c) > self.d for c in self.letters):
            raise ValueError(f"letters must lie in [-{self.d}, {self.d}]")

    def __len__(self):
        return len(self.letters)

    def displacements(self) -> np.ndarray:
        """``(len, d)`` integer array of the steps."""
        out = np.zeros((len(self.letters), self.d), dtype=np.int64)
        if self.letters:
            c = np.asarray(self.letters)
            rows = np.flatnonzero(c != 0)
            out[rows, np.abs(c[rows]) - 1] = np.sign(c[rows])
        return out

    @property
    def endpoint(self) -> tuple:
        return tuple(int(v) for v in self.displacements().sum(axis=0)) if self.letters else (0,) * self.d

    def trajectory(self) -> np.ndarray:
        """Vertices ``0, w_1, w_1 w_2, ...`` in Z^d."""
        out = np.zeros((len(self.letters) + 1, self.d), dtype=np.int64)
        np.cumsum(self.displacements(), axis=0, out=out[1:])
        return out

    def __add__(self, other: "Word") -> "Word":
        if other.d != self.d:
            raise ValueError("words live in different dimensions")
        return Word(self.letters + other.letters, self.d)

    @classmethod
    def from_codes(cls, codes, d: int, lazy: bool = False) -> "Word":
        """Map uniform codes ``0..2d-1`` (plus ``2d`` for a lazy step) to letters."""
        codes = np.asarray(codes, dtype=np.int64)
        axis = codes // 2 + 1
        sign = np.where(codes % 2 == 0, 1, -1)
        letters = np.where(codes == 2 * d, 0, sign * axis) if lazy else sign * axis
        return cls(tuple(letters.tolist()), d)


@dataclass(frozen=True)
class ClosingWord:
    x: tuple
    v_x: Word


def min_word(x) -> ClosingWord:
    """Shortest word representing ``-x``: axis 1 first, then axis 2, and so on."""
    x = tuple(int(c) for c in x)
    letters = []
    for i, c in enumerate(x, start=1):
        letters.extend([-i if c > 0 else i] * abs(c))
    return ClosingWord(x, Word(tuple(letters), max(len(x), 1)))


def random_word(n: int, d: int, seed: int, lazy: bool = False) -> Word:
    """Word of the simple random walk on Z^d (optionally with a lazy letter)."""
    k = 2 * d + (1 if lazy else 0)
    return Word.from_codes(make_rng(seed).integers(0, k, size=n), d, lazy)


def _planar_walk(points: np.ndarray) -> np.ndarray:
    """Drop repeated points so consecutive vertices differ by one unit step."""
    if len(points) == 0:
        return np.zeros((1, 2), dtype=np.int64)
    keep = np.ones(len(points), dtype=bool)
    keep[1:] = (np.diff(points, axis=0) != 0).any(axis=1)
    return points[keep]


def rnd_dehn_lower(word: Word, exact: bool = False):
    """Lower bound for the filling area of ``w v_{w-bar}`` with ``v`` from :func:`min_word`.

    The walk of ``w`` is projected to the first two coordinates and closed by
    a straight chord; its total winding number, minus ``4 l(v)^2`` for the
    disc that swaps the chord for ``v``, bounds the filling area from below.
    """
    if word.d < 2:
        raise ValueError("the random Dehn bound needs d >= 2")
    v = min_word(word.endpoint).v_x
    pts = _planar_walk(word.trajectory()[:, :2])
    if exact:
        area = total_winding(index_field(close_loop(WalkPath(LatticeKind.SQUARE, pts)))).rational
        return max(Fraction(0), area - 4 * len(v) ** 2)
    area, _, _ = loop_totals(pts)
    return max(0.0, float(area) - 4.0 * len(v) ** 2)


def abelianized_area(word: Word) -> float:
    """Total winding number of the projected word curve closed by its chord."""
    area, _, _ = loop_totals(_planar_walk(word.trajectory()[:, :2]))
    return float(area)


@dataclass(frozen=True)
class DehnEstimate:
    n: int
    samples: int
    mean: float | Fraction
    stderr: float
    exact: bool = False

    @property
    def ci(self) -> tuple[float, float]:
        m = float(self.mean)
        return m - 1.96 * self.stderr, m + 1.96 * self.stderr


def random_bridge(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform closed ``n``-step walk on Z^2, as vertices.

    In the rotated coordinates ``u = x + y``, ``v = x - y`` each step moves
    both by ``+-1`` independently, so a closed walk is a pair of independent
    ``+-1`` bridges, each a uniform shuffle of ``n / 2`` ups and downs.
    """
    half = np.repeat(np.array([1, -1], dtype=np.int64), n // 2)
    du = rng.permutation(half)
    dv = rng.permutation(half)
    steps = np.column_stack([(du + dv) // 2, (du - dv) // 2])
    out = np.zeros((n + 1, 2), dtype=np.int64)
    np.cumsum(steps, axis=0, out=out[1:])
    return out


def _all_bridges(n: int):
    """Every closed ``n``-step walk on Z^2, via pairs of +-1 bridges."""
    ups = [c for c in combinations(range(n), n // 2)]
    seqs = []
    for c in ups:
        s = -np.ones(n, dtype=np.int64)
        s[list(c)] = 1
        seqs.append(s)
    for du in seqs:
        for dv in seqs:
            steps = np.column_stack([(du + dv) // 2, (du - dv) // 2])
            out = np.zeros((n + 1, 2), dtype=np.int64)
            np.cumsum(steps, axis=0, out=out[1:])
            yield out


def avg_dehn_lower(n: int, samples: int, seed: int, exact_up_to: int = 8) -> DehnEstimate:
    """Mean total winding number of a uniform closed ``n``-step walk on Z^2.

    For ``n <= exact_up_to`` every closed walk is enumerated and the mean is
    an exact fraction; otherwise ``samples`` bridges are drawn.
    """
    if n < 2 or n % 2:
        raise ParityError(f"n = {n}: closed walks on Z^2 need an even n >= 2")
    if n <= exact_up_to:
        total = Fraction(0)
        count = 0
        for verts in _all_bridges(n):
            total += total_winding(index_field(close_loop(WalkPath(LatticeKind.SQUARE, verts)))).rational
            count += 1
        return DehnEstimate(n, count, total / count, 0.0, exact=True)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = make_rng(derive_seed(seed, n))
    vals = np.empty(samples)
    for i in range(samples):
        vals[i] = loop_totals(random_bridge(n, rng))[0]
    se = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else float("nan")
    return DehnEstimate(n, samples, float(vals.mean()), se)
