"""
Excursions between two half-lines
=================================

Around a point z, the walk is cut at its alternating visits to the two
halves of the slope-one line through the centre of z's cell. Each piece
winds half a turn, so the weights add up to the winding number up to 2.
"""
import numpy as np

from lattice_winding.excursions import (
    ExcursionClass,
    build_frame,
    census,
    classify,
    decompose,
    weight_symmetry_stats,
)
from lattice_winding.lattice_walk import ScaleParams, gen_step_codes, gen_walk

# %% one walk
n = 5000
walk = gen_walk("square", n, seed=7)
frame = build_frame((0.3, 0.6))
params = ScaleParams.for_lattice("square", n)
exs = classify(decompose(walk, frame), params, walk)
print("cell centre", frame.z_hat)
print(len(exs.excursions), "excursions, weight sum", exs.weight_sum,
      "winding", round(exs.theta / (2 * np.pi), 3), "residual", round(exs.residual, 3))
for cls in ExcursionClass:
    print(f"  {cls.value:12s} {exs.count(cls)}")
print("annulus crossings", exs.crossings)

# %% symmetry over many walks
sets = [decompose(gen_walk("square", 2000, seed=s), frame) for s in range(300)]
sym = weight_symmetry_stats(sets)
print(f"+1/2: {sym.plus}  -1/2: {sym.minus}  mean {sym.mean:+.4f} +- {sym.stderr:.4f}  p = {sym.p_value:.3f}")

# %% the streaming census used by the experiments gives the same counts
codes = gen_step_codes("square", n, seed=7)
print(census(codes, frame, params))

# %% triangular lattice: the reference edge s and zero-weight excursions
tframe = build_frame((0.5, 0.3), "triangular")
t = decompose(gen_walk("triangular", 5000, seed=1), tframe)
print("edge s", tframe.edge, "traversals", t.traversals,
      "zero weights", sum(e.weight == 0 for e in t.excursions))
