"""
Dehn function lower bounds
==========================

A word in the generators of Z^d is a lattice walk. Projected to the plane
and closed by a chord, its total winding number bounds the filling area of
the word from below.
"""
import math

from lattice_winding.dehn import Word, avg_dehn_lower, min_word, random_word, rnd_dehn_lower

# %% words and closing words
w = Word((1, 2, -1, -2), 2)
print("unit square word bound:", rnd_dehn_lower(w))
print("closing word for (2, -1):", min_word((2, -1)).v_x.letters)

# %% random words in Z^3
for n in (1_000, 10_000):
    vals = [rnd_dehn_lower(random_word(n, 3, seed=s)) for s in range(200)]
    mean = sum(vals) / len(vals)
    print(f"n = {n}: mean bound {mean:.1f}, / (n ln ln n) = {mean / (n * math.log(math.log(n))):.4f}")

# %% closed walks: exact for small n, sampled beyond
print("n = 4 exact:", avg_dehn_lower(4, 0, seed=0).mean)
for n in (256, 1024, 4096):
    e = avg_dehn_lower(n, 500, seed=0)
    print(f"n = {n}: mean/n = {e.mean / n:.4f} +- {e.stderr / n:.4f}")
