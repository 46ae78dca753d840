"""
Declarative experiments
=======================

Experiments are JSON configs. A run writes a CSV (with the config hash in
its header), an SVG and a JSON manifest; the CSV does not depend on the
number of workers. The same configs run from the shell with

    lattice-winding experiment config.json --out results/
"""
import json
import tempfile

from lattice_winding.harness import ExperimentConfig, belisle_test, fit_result, run

out = tempfile.mkdtemp(prefix="lw-demo-")

# %% the headline scaling, at toy size
cfg = ExperimentConfig.from_dict({
    "experiment": "total_winding_scaling",
    "n_values": [2**10, 2**12, 2**14],
    "samples": 200,
    "seed": 1,
    "output_dir": out,
})
print(cfg.to_json())
res = run(cfg)
print(open(res.files["csv"]).read())
fit = fit_result(res)
print(f"mean/n ~ {fit.a:.3f} + {fit.b:.3f} ln ln n  (2 pi b = {fit.b_in_units_of_reference:.2f})")
print("plot:", res.files["svg"])

# %% same config, more workers, same bytes
again = run(cfg.replace(workers=2))
print("identical CSV:", open(again.files["csv"]).read() == open(res.files["csv"]).read())

# %% pointwise law and the census
pw = run(ExperimentConfig(experiment="pointwise_index", n_values=(2**14,), samples=300,
                          z_points=((0.9, 0.4),), output_dir=out))
print(pw.rows[0])
cen = run(ExperimentConfig(experiment="excursion_census", n_values=(2**12, 2**14), samples=200,
                           z_points=((0.5, 0.5),), output_dir=out))
for row in cen.rows:
    print(row["n"], "small", row["mean_small"], "p_escape", round(row["p_escape"], 3))

# %% hyperbolic secant law (small run)
b = belisle_test(10**5, (0.5, 0.5), 300, seed=0)
print("KS distance:", round(b.ks, 3), "quantiles:", b.quantiles)

# %% bad configs are rejected with the offending field
try:
    ExperimentConfig.from_dict({"experiment": "belisle", "n_values": [10], "z_points": [[1.0, 0.5]]})
except ValueError as e:
    print("rejected:", e)
print(json.dumps(res.manifest()["files"], indent=2))
