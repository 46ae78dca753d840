"""Declarative Monte Carlo experiments.

An experiment is described by an :class:`ExperimentConfig` (JSON, versioned
schema, unknown keys rejected). Sample ``i`` of cell ``c`` is a pure function
of ``(config, c, i)``; samples run on a process pool in chunks, and results
are folded in sample order, so the output does not depend on the number of
workers. :func:`run` writes a CSV, an SVG and a JSON manifest.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .brownian import gen_bm, p_integral_target, sausage_contains, spitzer_target, werner_sample
from .dehn import random_bridge, random_word, rnd_dehn_lower
from .excursions import CENSUS_FIELDS, build_frame, census_array
from .lattice_walk import LatticeKind, ScaleParams, derive_seed, from_plane, gen_step_codes, make_rng, step_set
from .stats import Welford, ks_sech, scaling_fit
from .svg import Figure, Series, render
from .winding_core import loop_totals
from ._kernels import open_winding_codes, walk_vertices

SCHEMA_VERSION = 1
EXPERIMENTS = (
    "total_winding_scaling",
    "pointwise_index",
    "belisle",
    "werner",
    "spitzer",
    "excursion_census",
    "dehn_rnd",
    "dehn_avg",
)


class ConfigError(ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def in_domain(lattice, z) -> bool:
    """Whether the plane point ``z`` avoids every line carrying lattice edges."""
    a, b = from_plane(lattice, np.asarray(z, dtype=float))
    bad = float(a).is_integer() or float(b).is_integer()
    if LatticeKind.parse(lattice) is LatticeKind.TRIANGULAR:
        bad = bad or float(a + b).is_integer()
    return not bad


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment. ``z_points`` units depend on the experiment.

    * ``pointwise_index``: rescaled units (multiplied by ``sqrt(kappa n)``);
    * ``belisle``, ``excursion_census``: lattice units;
    * ``spitzer``: plane units of the Brownian motion on [0, 1].
    """

    experiment: str
    lattice: str = "square"
    n_values: tuple = ()
    samples: int = 1
    z_points: tuple = ()
    c0: float = 1.0
    bm_resolution: int = 100_000
    epsilon: tuple = (1e-3,)
    seed: int = 0
    workers: int = 1
    output_dir: str = "results"
    k_values: tuple = (5, 6, 7, 8, 9, 10)
    dimension: int = 2
    refine_depth: int | None = None
    grid_spacing: float = 0.05
    schema_version: int = SCHEMA_VERSION

    # fields that do not change results; left out of the hash
    _RUNTIME = ("workers", "output_dir")

    def __post_init__(self):
        def tup(name, conv):
            v = getattr(self, name)
            try:
                object.__setattr__(self, name, tuple(conv(x) for x in v))
            except (TypeError, ValueError):
                raise ConfigError(name, f"expected a list, got {v!r}") from None

        tup("n_values", int)
        tup("epsilon", float)
        tup("k_values", int)
        tup("z_points", lambda p: (float(p[0]), float(p[1])))
        self.validate()

    def validate(self) -> None:
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError("schema_version", f"unsupported version {self.schema_version}")
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown experiment {self.experiment!r}; one of {', '.join(EXPERIMENTS)}")
        try:
            lat = LatticeKind.parse(self.lattice)
        except ValueError as e:
            raise ConfigError("lattice", str(e)) from None
        if not isinstance(self.samples, int) or self.samples < 1:
            raise ConfigError("samples", "must be an integer >= 1")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers", "must be an integer >= 1")
        if list(self.n_values) != sorted(self.n_values):
            raise ConfigError("n_values", "must be sorted ascending")
        if any(n < 1 for n in self.n_values):
            raise ConfigError("n_values", "must be >= 1")
        needs_n = self.experiment not in ("werner", "spitzer")
        if needs_n and not self.n_values:
            raise ConfigError("n_values", f"required for {self.experiment}")
        if self.c0 <= 0:
            raise ConfigError("c0", "must be positive")
        if self.bm_resolution < 1:
            raise ConfigError("bm_resolution", "must be >= 1")
        if any(e <= 0 for e in self.epsilon):
            raise ConfigError("epsilon", "must be positive")
        if any(k < 1 for k in self.k_values):
            raise ConfigError("k_values", "must be >= 1")
        if self.dimension < 2:
            raise ConfigError("dimension", "must be >= 2")
        if self.grid_spacing <= 0:
            raise ConfigError("grid_spacing", "must be positive")
        if self.experiment == "dehn_avg" and any(n % 2 for n in self.n_values):
            raise ConfigError("n_values", "closed walks on Z^2 need even n")
        if self.experiment in ("pointwise_index", "belisle", "excursion_census", "spitzer") and not self.z_points:
            raise ConfigError("z_points", f"required for {self.experiment}")
        for z in self.z_points:
            if self.experiment == "pointwise_index":
                for n in self.n_values:
                    s = ScaleParams.for_lattice(lat, n).rescale
                    if not in_domain(lat, (z[0] * s, z[1] * s)):
                        raise ConfigError("z_points", f"{z} lies on a lattice edge at n = {n}")
            elif self.experiment in ("belisle", "excursion_census"):
                if not in_domain(lat, z):
                    raise ConfigError("z_points", f"{z} lies on a lattice edge")
            elif self.experiment == "spitzer" and z == (0.0, 0.0):
                raise ConfigError("z_points", "z = 0 is the starting point")

    # -- serialization --------------------------------------------------
    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for k in ("n_values", "epsilon", "k_values"):
            d[k] = list(d[k])
        d["z_points"] = [list(z) for z in self.z_points]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(unknown[0], f"unknown key(s): {', '.join(unknown)}")
        if "experiment" not in data:
            raise ConfigError("experiment", "missing")
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError("<root>", str(e)) from None

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError("<json>", str(e)) from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_json(fh.read())

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    @property
    def config_hash(self) -> str:
        d = self.to_dict()
        for k in self._RUNTIME:
            d.pop(k)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


# ----------------------------------------------------------------------
# experiments: cells, per-sample values, rows


def _lattice(cfg) -> LatticeKind:
    return LatticeKind.parse(cfg.lattice)


def _walk_codes(cfg, n, i):
    return gen_step_codes(_lattice(cfg), n, derive_seed(cfg.seed, n, i))


def _basis(cfg, z):
    return tuple(float(c) for c in from_plane(_lattice(cfg), np.asarray(z, dtype=float)))


def _open_angles(cfg, codes, zs):
    lat = _lattice(cfg)
    tri = lat is LatticeKind.TRIANGULAR
    out = np.empty(len(zs))
    for k, z in enumerate(zs):
        za, zb = _basis(cfg, z)
        out[k] = open_winding_codes(codes, step_set(lat), tri, za, zb)[0]
    return out


def _lattice_z(cfg, n):
    s = ScaleParams.for_lattice(_lattice(cfg), n).rescale
    return [(z[0] * s, z[1] * s) for z in cfg.z_points]


class _Experiment:
    columns: tuple = ()

    def cells(self, cfg):
        return [(n,) for n in cfg.n_values]

    def seed_key(self, cell):
        return cell

    def sample(self, cfg, cell, i) -> np.ndarray:
        raise NotImplementedError

    def rows(self, cfg, cell, values: np.ndarray) -> list:
        raise NotImplementedError

    def figure(self, cfg, rows) -> Figure:
        return Figure(title=cfg.experiment)


def _moments(values) -> Welford:
    return Welford().extend(values)


def _ci_cols(w: Welford) -> dict:
    lo, hi = w.ci()
    return {"var": w.variance, "ci_lo": lo, "ci_hi": hi}


class _Scaling(_Experiment):
    columns = ("n", "samples", "mean_total_winding", "var", "ci_lo", "ci_hi", "mean_over_n", "reference_over_n", "extension")

    def sample(self, cfg, cell, i):
        (n,) = cell
        lat = _lattice(cfg)
        v = walk_vertices(_walk_codes(cfg, n, i), step_set(lat))
        return np.array([loop_totals(v, lat)[0]])

    def rows(self, cfg, cell, values):
        (n,) = cell
        w = _moments(values[:, 0])
        return [
            {
                "n": n,
                "samples": w.count,
                "mean_total_winding": w.mean,
                **_ci_cols(w),
                "mean_over_n": w.mean / n,
                "reference_over_n": math.log(math.log(n)) / (2 * math.pi) if n > 2 else float("nan"),
                "extension": int(_lattice(cfg) is LatticeKind.TRIANGULAR),
            }
        ]

    def figure(self, cfg, rows):
        x = [math.log(math.log(r["n"])) for r in rows]
        return Figure(
            "E[total winding] / n",
            "ln ln n",
            "mean / n",
            [
                Series("simulation", x, [r["mean_over_n"] for r in rows], errors=[(r["ci_hi"] - r["ci_lo"]) / 2 for r in rows]),
                Series("(1/2pi) ln ln n", x, [r["reference_over_n"] for r in rows], style="line"),
            ],
        )


class _Pointwise(_Experiment):
    columns = ("n", "z_re", "z_im", "mean_abs_index", "target_p_integral", "ratio_to_lnlnn", "samples", "var", "ci_lo", "ci_hi")

    def sample(self, cfg, cell, i):
        (n,) = cell
        th = _open_angles(cfg, _walk_codes(cfg, n, i), _lattice_z(cfg, n))
        return np.abs(np.round(th / (2 * math.pi)))

    def rows(self, cfg, cell, values):
        (n,) = cell
        out = []
        for k, z in enumerate(cfg.z_points):
            w = _moments(values[:, k])
            out.append(
                {
                    "n": n,
                    "z_re": z[0],
                    "z_im": z[1],
                    "mean_abs_index": w.mean,
                    "target_p_integral": p_integral_target(z),
                    "ratio_to_lnlnn": w.mean / math.log(math.log(n)),
                    "samples": w.count,
                    **_ci_cols(w),
                }
            )
        return out

    def figure(self, cfg, rows):
        last = max(r["n"] for r in rows)
        sel = [r for r in rows if r["n"] == last]
        x = [math.hypot(r["z_re"], r["z_im"]) for r in sel]
        return Figure(
            f"E|j_n(z)| / ln ln n at n = {last}",
            "|z|",
            "ratio",
            [Series("simulation", x, [r["ratio_to_lnlnn"] for r in sel]), Series("E1(|z|^2/2)/(2 pi^2)", x, [r["target_p_integral"] for r in sel])],
        )


class _Belisle(_Experiment):
    columns = ("n", "z_re", "z_im", "samples", "ks_statistic", "ks_rounded", "ks_literal", "q25", "median", "q75")

    def sample(self, cfg, cell, i):
        (n,) = cell
        return _open_angles(cfg, _walk_codes(cfg, n, i), cfg.z_points)

    def rows(self, cfg, cell, values):
        (n,) = cell
        out = []
        for k, z in enumerate(cfg.z_points):
            r = belisle_summary(values[:, k], n)
            out.append({"n": n, "z_re": z[0], "z_im": z[1], **r})
        return out


class _Werner(_Experiment):
    columns = ("k", "samples", "mean", "var", "ci_lo", "ci_hi", "target")

    def cells(self, cfg):
        return [(cfg.bm_resolution,)]

    def sample(self, cfg, cell, i):
        (m,) = cell
        depth = 300 if cfg.refine_depth is None else cfg.refine_depth
        path = gen_bm(m, derive_seed(cfg.seed, m, i))
        return werner_sample(path, cfg.k_values, cfg.grid_spacing, depth)

    def rows(self, cfg, cell, values):
        out = []
        for j, k in enumerate(cfg.k_values):
            w = _moments(values[:, j])
            out.append({"k": k, "samples": w.count, "mean": w.mean, **_ci_cols(w), "target": 1 / (2 * math.pi)})
        return out

    def figure(self, cfg, rows):
        ks = [r["k"] for r in rows]
        return Figure(
            "k^2 area{winding = k}",
            "k",
            "k^2 area",
            [
                Series("simulation", ks, [r["mean"] for r in rows], errors=[(r["ci_hi"] - r["ci_lo"]) / 2 for r in rows]),
                Series("1/2pi", ks, [1 / (2 * math.pi)] * len(ks), style="line"),
            ],
        )


class _Spitzer(_Experiment):
    columns = ("epsilon", "z_re", "z_im", "samples", "hit_rate", "scaled", "ci_lo", "ci_hi", "target")

    def cells(self, cfg):
        return [(e, z) for e in cfg.epsilon for z in cfg.z_points]

    def seed_key(self, cell):
        # every (epsilon, z) cell sees the same paths
        return (0,)

    def sample(self, cfg, cell, i):
        eps, z = cell
        depth = 60 if cfg.refine_depth is None else cfg.refine_depth
        path = gen_bm(cfg.bm_resolution, derive_seed(cfg.seed, i))
        return np.array([float(sausage_contains(path, eps, z, closed=True, refine=True, max_depth=depth))])

    def rows(self, cfg, cell, values):
        eps, z = cell
        w = _moments(values[:, 0])
        s = abs(math.log(eps))
        lo, hi = w.ci()
        return [
            {
                "epsilon": eps,
                "z_re": z[0],
                "z_im": z[1],
                "samples": w.count,
                "hit_rate": w.mean,
                "scaled": s * w.mean,
                "ci_lo": s * lo,
                "ci_hi": s * hi,
                "target": spitzer_target(z),
            }
        ]


class _Census(_Experiment):
    columns = ("n", "z_re", "z_im", "samples") + tuple(f"mean_{f}" for f in CENSUS_FIELDS) + ("small_var", "small_ci_lo", "small_ci_hi", "p_escape")

    def cells(self, cfg):
        return [(n, z) for n in cfg.n_values for z in cfg.z_points]

    def seed_key(self, cell):
        return (cell[0],)

    def sample(self, cfg, cell, i):
        n, z = cell
        lat = _lattice(cfg)
        params = ScaleParams.for_lattice(lat, max(n, 2), c0=cfg.c0)
        return census_array(_walk_codes(cfg, n, i), build_frame(z, lat), params)

    def rows(self, cfg, cell, values):
        n, z = cell
        row = {"n": n, "z_re": z[0], "z_im": z[1], "samples": len(values)}
        for j, f in enumerate(CENSUS_FIELDS):
            row[f"mean_{f}"] = _moments(values[:, j]).mean
        w = _moments(values[:, CENSUS_FIELDS.index("small")])
        row["small_var"] = w.variance
        row["small_ci_lo"], row["small_ci_hi"] = w.ci()
        trials = values[:, CENSUS_FIELDS.index("escape_trials")].sum()
        succ = values[:, CENSUS_FIELDS.index("escape_successes")].sum()
        row["p_escape"] = succ / trials if trials else float("nan")
        return [row]

    def figure(self, cfg, rows):
        x = [math.log(r["n"]) for r in rows]
        return Figure("small excursions", "ln n", "E[#small]", [Series("simulation", x, [r["mean_small"] for r in rows])])


class _DehnRnd(_Experiment):
    columns = ("n", "d", "samples", "mean_bound", "ci_low", "ci_high", "seed")

    def sample(self, cfg, cell, i):
        (n,) = cell
        return np.array([rnd_dehn_lower(random_word(n, cfg.dimension, derive_seed(cfg.seed, n, i)))])

    def rows(self, cfg, cell, values):
        (n,) = cell
        w = _moments(values[:, 0])
        lo, hi = w.ci()
        return [{"n": n, "d": cfg.dimension, "samples": w.count, "mean_bound": w.mean, "ci_low": lo, "ci_high": hi, "seed": cfg.seed}]

    def figure(self, cfg, rows):
        x = [math.log(math.log(r["n"])) for r in rows if r["n"] > 2]
        y = [r["mean_bound"] / r["n"] for r in rows if r["n"] > 2]
        return Figure(cfg.experiment, "ln ln n", "mean bound / n", [Series("simulation", x, y)])


class _DehnAvg(_DehnRnd):
    def sample(self, cfg, cell, i):
        (n,) = cell
        return np.array([loop_totals(random_bridge(n, make_rng(derive_seed(cfg.seed, n, i))))[0]])

    def rows(self, cfg, cell, values):
        rows = super().rows(cfg, cell, values)
        rows[0]["d"] = 2
        return rows


REGISTRY = {
    "total_winding_scaling": _Scaling(),
    "pointwise_index": _Pointwise(),
    "belisle": _Belisle(),
    "werner": _Werner(),
    "spitzer": _Spitzer(),
    "excursion_census": _Census(),
    "dehn_rnd": _DehnRnd(),
    "dehn_avg": _DehnAvg(),
}


def belisle_summary(theta, n: int) -> dict:
    """KS distances to the hyperbolic secant law for winding angles ``theta``.

    ``ks_statistic`` uses ``2 theta / ln n``; ``ks_rounded`` uses the
    same scaling of the integer index, ``4 pi j / ln n``; ``ks_literal``
    compares ``j / ln n`` directly.
    """
    theta = np.asarray(theta, dtype=float)
    ln = math.log(n)
    x = 2.0 * theta / ln
    j = np.round(theta / (2 * math.pi))
    q25, med, q75 = np.quantile(x, [0.25, 0.5, 0.75])
    return {
        "samples": len(theta),
        "ks_statistic": ks_sech(x),
        "ks_rounded": ks_sech(4 * math.pi * j / ln),
        "ks_literal": ks_sech(j / ln),
        "q25": float(q25),
        "median": float(med),
        "q75": float(q75),
    }


# ----------------------------------------------------------------------
# execution


def _work(task):
    cfg_dict, cell_index, start, stop = task
    cfg = ExperimentConfig.from_dict(cfg_dict)
    exp = REGISTRY[cfg.experiment]
    cell = exp.cells(cfg)[cell_index]
    return np.array([exp.sample(cfg, cell, i) for i in range(start, stop)], dtype=float)


def _tasks(cfg, ncells):
    chunk = max(1, min(256, math.ceil(cfg.samples / (4 * cfg.workers))))
    d = cfg.to_dict()
    return [(d, c, s, min(s + chunk, cfg.samples)) for c in range(ncells) for s in range(0, cfg.samples, chunk)]


@dataclass
class RunResult:
    config: ExperimentConfig
    config_hash: str
    rows: list
    wall_clock: float
    version: str = __version__
    files: dict = field(default_factory=dict)

    def manifest(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_dict(),
            "config_hash": self.config_hash,
            "version": self.version,
            "wall_clock_seconds": self.wall_clock,
            "files": self.files,
            "rows": self.rows,
        }

    @classmethod
    def from_manifest(cls, data: dict) -> "RunResult":
        cfg = ExperimentConfig.from_dict(data["config"])
        return cls(cfg, data["config_hash"], data["rows"], data["wall_clock_seconds"], data["version"], data.get("files", {}))

    def column(self, name: str) -> list:
        return [r[name] for r in self.rows]


def collect(cfg: ExperimentConfig) -> list:
    """Per-cell arrays of sample values, in sample order."""
    exp = REGISTRY[cfg.experiment]
    cells = exp.cells(cfg)
    tasks = _tasks(cfg, len(cells))
    if cfg.workers == 1:
        parts = [_work(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            # map preserves task order whatever the completion order
            parts = list(pool.map(_work, tasks))
    out = [[] for _ in cells]
    for t, p in zip(tasks, parts):
        out[t[1]].append(p)
    return [np.concatenate(p, axis=0) for p in out]


def run(cfg: ExperimentConfig, write: bool = True) -> RunResult:
    """Run the experiment; with ``write`` store CSV, SVG and manifest in ``output_dir``."""
    t0 = time.perf_counter()
    exp = REGISTRY[cfg.experiment]
    values = collect(cfg)
    rows = []
    for cell, v in zip(exp.cells(cfg), values):
        rows.extend(exp.rows(cfg, cell, v))
    result = RunResult(cfg, cfg.config_hash, rows, time.perf_counter() - t0)
    if write:
        stem = os.path.join(cfg.output_dir, f"{cfg.experiment}_{cfg.config_hash}")
        # render everything before touching the disk
        csv_text = format_csv(result)
        svg_text = render(exp.figure(cfg, rows))
        result.files = {"csv": stem + ".csv", "svg": stem + ".svg", "manifest": stem + ".json"}
        _atomic_write(result.files["csv"], csv_text)
        _atomic_write(result.files["svg"], svg_text)
        _atomic_write(result.files["manifest"], json.dumps(_jsonable(result.manifest()), indent=2, sort_keys=True))
    return result


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, Fraction):
        return str(x)
    return x


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def format_csv(result: RunResult) -> str:
    exp = REGISTRY[result.config.experiment]
    lines = [
        f"# lattice_winding {result.version}",
        f"# experiment {result.config.experiment} config_hash {result.config_hash}",
        ",".join(exp.columns),
    ]
    for r in result.rows:
        lines.append(",".join(_fmt(r[c]) for c in exp.columns))
    return "\n".join(lines) + "\n"


def emit_csv(result: RunResult, path: str) -> None:
    _atomic_write(path, format_csv(result))


def emit_svg(series, path: str, title: str = "", xlabel: str = "", ylabel: str = "") -> None:
    """Write a plot of ``series`` (list of :class:`Series`, or a :class:`Figure`)."""
    fig = series if isinstance(series, Figure) else Figure(title, xlabel, ylabel, list(series))
    _atomic_write(path, render(fig))


def scaling_series(result: RunResult) -> list:
    """Empirical means and the reference curve of a scaling run, ready for :func:`emit_svg`."""
    return REGISTRY["total_winding_scaling"].figure(result.config, result.rows).series


def fit_result(result: RunResult):
    """:func:`scaling_fit` applied to a ``total_winding_scaling`` run."""
    return scaling_fit(result.column("n"), result.column("mean_total_winding"))


@dataclass(frozen=True)
class BelisleResult:
    ks: float
    ks_rounded: float
    ks_literal: float
    quantiles: dict
    samples: int


def belisle_test(n: int, z, samples: int, seed: int, lattice="square", workers: int = 1) -> BelisleResult:
    """Distance between the law of the winding around ``z`` (lattice units) and the sech law."""
    cfg = ExperimentConfig(
        experiment="belisle", lattice=str(LatticeKind.parse(lattice).value), n_values=(n,), samples=samples,
        z_points=(tuple(z),), seed=seed, workers=workers,
    )
    r = run(cfg, write=False).rows[0]
    return BelisleResult(r["ks_statistic"], r["ks_rounded"], r["ks_literal"], {"q25": r["q25"], "median": r["median"], "q75": r["q75"]}, r["samples"])
