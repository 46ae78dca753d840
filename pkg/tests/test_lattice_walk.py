import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from lattice_winding.lattice_walk import (
    LatticeKind,
    ScaleParams,
    WalkPath,
    close_loop,
    derive_seed,
    from_plane,
    gen_step_codes,
    gen_walk,
    step_covariance,
    step_set,
    step_variance,
    to_plane,
)

from conftest import FIXTURE_12

LATTICES = [LatticeKind.SQUARE, LatticeKind.TRIANGULAR]


def _is_step(lattice, d):
    return any((d == s).all() for s in step_set(lattice))


@pytest.mark.parametrize("lattice", LATTICES)
def test_one_step_is_in_step_set(lattice):
    for seed in range(20):
        w = gen_walk(lattice, 1, seed)
        assert w.n == 1
        assert tuple(w.vertices[0]) == (0, 0)
        assert _is_step(lattice, w.vertices[1] - w.vertices[0])


@pytest.mark.parametrize("lattice", LATTICES)
def test_every_generated_path_is_valid(lattice):
    for seed in range(50):
        w = gen_walk(lattice, 200, seed)
        assert w.is_valid()
        assert (w.vertices[0] == 0).all()


def test_triangular_steps_are_unit_vectors():
    pts = to_plane(LatticeKind.TRIANGULAR, step_set(LatticeKind.TRIANGULAR).astype(float))
    np.testing.assert_allclose(np.hypot(pts[:, 0], pts[:, 1]), 1.0)
    angles = np.sort(np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * math.pi))
    np.testing.assert_allclose(angles, np.arange(6) * math.pi / 3, atol=1e-12)


@pytest.mark.parametrize("lattice", LATTICES)
def test_kappa_from_step_set(lattice):
    # both step sets are isotropic with per-coordinate variance 1/2
    np.testing.assert_allclose(step_covariance(lattice), 0.5 * np.eye(2), atol=1e-15)
    assert step_variance(lattice) == pytest.approx(0.5)


@pytest.mark.parametrize("lattice", LATTICES)
def test_seed_determinism(lattice):
    a = gen_walk(lattice, 500, 1234)
    b = gen_walk(lattice, 500, 1234)
    assert np.array_equal(a.vertices, b.vertices)
    assert not np.array_equal(a.vertices, gen_walk(lattice, 500, 1235).vertices)


def test_zero_steps_rejected():
    with pytest.raises(ValueError):
        gen_walk("square", 0, 1)


def test_invalid_vertices_rejected():
    w = WalkPath.from_vertices("square", [(0, 0), (1, 0)])
    assert w.is_valid()
    with pytest.raises(ValueError):
        WalkPath.from_vertices("square", [(0, 0), (1, 1)])
    # explicit vertices are translated to start at the origin
    assert WalkPath.from_vertices("square", [(1, 0), (2, 0)]) == w


def test_large_walk_moments():
    codes = gen_step_codes("square", 10**6, 7)
    steps = step_set("square")[codes].astype(float)
    mean = steps.mean(axis=0)
    # per-coordinate step sd is sqrt(1/2)
    se = math.sqrt(0.5 / len(steps))
    assert (np.abs(mean) < 4 * se).all()
    var = steps.var(axis=0)
    assert np.all(np.abs(var - 0.5) < 0.01)


@pytest.mark.parametrize("lattice", LATTICES)
def test_step_frequencies_uniform(lattice):
    codes = gen_step_codes(lattice, 10**6, 99)
    k = len(step_set(lattice))
    counts = np.bincount(codes, minlength=k)
    assert stats.chisquare(counts).pvalue > 1e-4


def test_close_loop_examples(square_walk):
    w = WalkPath.from_vertices("square", [(0, 0), (1, 0), (1, 1), (0, 1)])
    loop = close_loop(w)
    assert loop.chord == ((0, 1), (0, 0))
    assert not loop.degenerate_chord
    assert close_loop(square_walk).degenerate_chord

    fx = close_loop(WalkPath.from_vertices("square", FIXTURE_12))
    assert fx.chord == (tuple(FIXTURE_12[-1]), tuple(FIXTURE_12[0]))


def test_derive_seed_distinct():
    seeds = {derive_seed(1, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)
    assert derive_seed(5, 5) == derive_seed(5, 5)


def test_scale_params():
    p = ScaleParams.for_lattice("square", 1000, c0=2.0)
    assert p.r_n == pytest.approx(2 * math.log(1000))
    assert p.rescale == pytest.approx(math.sqrt(500))
    assert p.epsilon_n == pytest.approx(p.r_n / p.rescale)
    with pytest.raises(ValueError):
        ScaleParams(n=0)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
@settings(max_examples=200)
def test_plane_roundtrip(a, b):
    for lattice in LATTICES:
        p = to_plane(lattice, np.array([a, b], dtype=float))
        np.testing.assert_allclose(from_plane(lattice, p), [a, b], atol=1e-9 * (1 + abs(a) + abs(b)))
