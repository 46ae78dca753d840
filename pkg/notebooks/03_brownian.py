"""
Brownian comparisons
====================

Winding of planar Brownian motion, the Wiener sausage, and the two limits
that the lattice results lean on: Spitzer's sausage estimate and Werner's
k^2 area law.
"""
import math

from lattice_winding.brownian import (
    bm_winding_angle,
    distance_to_path,
    gen_bm,
    gen_bridge,
    p_integral_target,
    sausage_contains,
    spitzer_estimate,
    spitzer_target,
    werner_area_estimate,
    z_epsilon,
)

# %% a path and its winding around a point, with refinement near the point
path = gen_bm(100_000, seed=2025)
z = complex(0.3, 0.1)
for depth in (0, 4, 8, 12):
    w = bm_winding_angle(path, z, max_refine_depth=depth)
    print(f"depth {depth:2d}: angle {w.angle:+.4f} ({w.refinements} splits)")
print("closest approach", distance_to_path(path, z))

# %% the bridge is the motion minus its drift
b = gen_bridge(1000, seed=1)
print("bridge end", b.samples[-1])

# %% the clock Z_eps and the sausage
for eps in (1e-1, 1e-2, 1e-3):
    print(f"eps {eps:g}: Z_eps = {z_epsilon(path, z, eps).value:.3f}, "
          f"z in sausage: {sausage_contains(path, eps, z)}")

# %% Spitzer: |ln eps| P[z in W_eps] -> E_1(|z|^2 / 2) / 2
est = spitzer_estimate(20_000, 1e-3, z=1.0, m=1024, seed=0)
print(f"Spitzer: {est.mean:.4f} +- {est.stderr:.4f}, limit {spitzer_target(1.0):.4f}")
print("E|j_n(z)| / ln ln n target at z = 1:", p_integral_target(1.0))

# %% Werner: k^2 area{winding in [2 pi k, 2 pi (k+1))} -> 1 / 2 pi (a few paths only)
res = werner_area_estimate([1, 2, 3], 5, m=20_000, seed=0, max_depth=100)
for k, e in res.items():
    print(f"k = {k}: {e.mean:.3f} +- {e.stderr:.3f}  (limit {1 / (2 * math.pi):.3f})")
