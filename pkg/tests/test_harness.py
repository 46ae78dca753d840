import json
import math
import os
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from lattice_winding.harness import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    RunResult,
    belisle_summary,
    emit_csv,
    emit_svg,
    format_csv,
    in_domain,
    run,
    scaling_series,
)
from lattice_winding.svg import Figure, Series, render

SVG_NS = "{http://www.w3.org/2000/svg}"


def cfg(**kw):
    base = dict(experiment="total_winding_scaling", n_values=[64, 128, 256], samples=40)
    base.update(kw)
    return ExperimentConfig.from_dict(base)


# -- config ---------------------------------------------------------------


def test_unknown_key_named():
    with pytest.raises(ConfigError) as e:
        ExperimentConfig.from_dict({"experiment": "belisle", "n_vals": [10]})
    assert e.value.field == "n_vals"


@pytest.mark.parametrize(
    "changes,field",
    [
        ({"samples": 0}, "samples"),
        ({"n_values": [128, 64]}, "n_values"),
        ({"experiment": "nope"}, "experiment"),
        ({"lattice": "hex"}, "lattice"),
        ({"schema_version": 2}, "schema_version"),
        ({"workers": 0}, "workers"),
        ({"experiment": "belisle", "z_points": [[1.0, 0.5]]}, "z_points"),
        ({"experiment": "belisle", "z_points": []}, "z_points"),
        ({"experiment": "dehn_avg", "n_values": [63, 64]}, "n_values"),
        ({"epsilon": [-1.0]}, "epsilon"),
    ],
)
def test_invalid_fields(changes, field):
    with pytest.raises(ConfigError) as e:
        cfg(**changes)
    assert e.value.field == field


def test_pointwise_z_checked_after_rescaling():
    # sqrt(n / 2) = 8 at n = 128, so z = 0.125 lands on x = 1
    with pytest.raises(ConfigError):
        cfg(experiment="pointwise_index", n_values=[128], z_points=[[0.125, 0.3]])
    cfg(experiment="pointwise_index", n_values=[128], z_points=[[0.13, 0.3]])


def test_in_domain():
    assert in_domain("square", (0.5, 0.5))
    assert not in_domain("square", (1.0, 0.5))
    assert not in_domain("triangular", (0.5, 0.0))
    assert in_domain("triangular", (0.5, 0.3))


def test_json_roundtrip_and_hash():
    c = cfg(seed=5)
    again = ExperimentConfig.from_json(c.to_json())
    assert again == c
    assert again.config_hash == c.config_hash
    assert c.replace(workers=4, output_dir="x").config_hash == c.config_hash
    assert c.replace(seed=6).config_hash != c.config_hash
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json("{not json")


# -- run ------------------------------------------------------------------


def test_single_sample_single_row(tmp_path):
    c = cfg(n_values=[100], samples=1, output_dir=str(tmp_path))
    r1 = run(c)
    text = open(r1.files["csv"]).read()
    rows = [l for l in text.splitlines() if not l.startswith("#")]
    assert rows[0] == "n,samples,mean_total_winding,var,ci_lo,ci_hi,mean_over_n,reference_over_n,extension"
    assert len(rows) == 2
    r2 = run(c)
    assert open(r2.files["csv"]).read() == text


def test_csv_header_carries_hash_and_version(tmp_path):
    r = run(cfg(output_dir=str(tmp_path)))
    head = open(r.files["csv"]).read().splitlines()[:2]
    assert "0.1.0" in head[0]
    assert r.config_hash in head[1]


@pytest.mark.parametrize("experiment", ["total_winding_scaling", "excursion_census", "dehn_avg"])
def test_worker_count_does_not_change_output(experiment):
    extra = {"z_points": [[0.5, 0.5]]} if experiment == "excursion_census" else {}
    c = cfg(experiment=experiment, samples=50, **extra)
    a = format_csv(run(c.replace(workers=1), write=False))
    b = format_csv(run(c.replace(workers=3), write=False))
    assert a == b


def _row_integral(vertices):
    """Serial oracle for the integral of |index|: exact in x, 8 heights per row."""
    v = np.asarray(vertices, dtype=float)
    poly = np.vstack([v, v[:1]])
    a, b = poly[:-1], poly[1:]
    total = 0.0
    ylo, yhi = int(v[:, 1].min()), int(v[:, 1].max())
    for r in range(ylo, yhi):
        for y in r + (np.arange(8) + 0.5) / 8:
            lo = np.minimum(a[:, 1], b[:, 1])
            hi = np.maximum(a[:, 1], b[:, 1])
            m = (lo < y) & (y < hi)
            t = (y - a[m, 1]) / (b[m, 1] - a[m, 1])
            xs = a[m, 0] + t * (b[m, 0] - a[m, 0])
            sgn = np.where(b[m, 1] > a[m, 1], 1, -1)
            order = np.argsort(xs)
            xs, sgn = xs[order], sgn[order]
            # index left of crossing j is the sum of signs at and right of j
            idx = np.cumsum(sgn[::-1])[::-1]
            gaps = np.diff(xs)
            total += float(np.sum(np.abs(idx[1:]) * gaps)) / 8
    return total


def test_scaling_against_serial_oracle():
    n = 2**10
    c = cfg(n_values=[n], samples=1000, seed=11)
    row = run(c, write=False).rows[0]
    rng = np.random.default_rng(12345)
    steps = np.array([(1, 0), (0, 1), (-1, 0), (0, -1)])
    vals = []
    for _ in range(400):
        v = np.vstack([[0, 0], np.cumsum(steps[rng.integers(0, 4, n)], axis=0)])
        vals.append(_row_integral(v))
    vals = np.array(vals)
    oracle_mean = vals.mean() / n
    oracle_half = 1.96 * vals.std(ddof=1) / math.sqrt(len(vals)) / n
    half = (row["ci_hi"] - row["ci_lo"]) / 2 / n
    assert abs(row["mean_over_n"] - oracle_mean) < 3 * (half + oracle_half)


def test_row_oracle_unit_square():
    assert _row_integral([(0, 0), (1, 0), (1, 1), (0, 1)]) == pytest.approx(1.0)


def test_manifest_roundtrip(tmp_path):
    r = run(cfg(output_dir=str(tmp_path)))
    data = json.load(open(r.files["manifest"]))
    back = RunResult.from_manifest(data)
    assert back.config == r.config
    assert back.config_hash == r.config_hash
    assert back.files == r.files
    assert [row["mean_total_winding"] for row in back.rows] == [row["mean_total_winding"] for row in r.rows]
    assert back.manifest() == data


def test_unwritable_path_reported(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        run(cfg(output_dir=str(blocker / "sub")))


def test_no_partial_results(tmp_path, monkeypatch):
    import lattice_winding.harness as h

    def boom(fig):
        raise RuntimeError("render failed")

    monkeypatch.setattr(h, "render", boom)
    with pytest.raises(RuntimeError):
        run(cfg(output_dir=str(tmp_path)))
    assert os.listdir(tmp_path) == []


def test_all_experiments_registered():
    from lattice_winding.harness import REGISTRY

    assert set(REGISTRY) == set(EXPERIMENTS)


def test_triangular_scaling_flags_extension():
    r = run(cfg(lattice="triangular", samples=5), write=False)
    assert all(row["extension"] == 1 for row in r.rows)


# -- belisle summary -----------------------------------------------------


def test_belisle_point_mass():
    s = belisle_summary(np.zeros(50), 1000)
    assert s["ks_statistic"] == pytest.approx(0.5)
    assert s["median"] == 0.0


def test_belisle_symmetric_median():
    th = np.random.default_rng(0).normal(0, 5, 501)
    s = belisle_summary(np.concatenate([th, -th]), 10**4)
    assert s["median"] == pytest.approx(0.0, abs=1e-12)


# -- svg ------------------------------------------------------------------


def _parse(text):
    return ET.fromstring(text)


def test_empty_series_valid_svg(tmp_path):
    p = tmp_path / "e.svg"
    emit_svg([], str(p), title="empty")
    root = _parse(p.read_text())
    assert root.tag == SVG_NS + "svg"
    assert not root.findall(SVG_NS + "circle")


def test_one_point_one_marker():
    root = _parse(render(Figure("one", "x", "y", [Series("s", [1.0], [2.0])])))
    assert len(root.findall(SVG_NS + "circle")) == 1


def test_scaling_svg_overlays_reference(tmp_path):
    r = run(cfg(output_dir=str(tmp_path)))
    root = _parse(open(r.files["svg"]).read())
    assert len(root.findall(SVG_NS + "circle")) == 3
    assert len(root.findall(SVG_NS + "polyline")) == 1
    labels = [t.text for t in root.iter(SVG_NS + "text")]
    assert "(1/2pi) ln ln n" in labels
    series = scaling_series(r)
    assert series[1].ys[0] == pytest.approx(math.log(math.log(64)) / (2 * math.pi))


def test_emit_csv_unwritable(tmp_path):
    r = run(cfg(samples=2), write=False)
    blocker = tmp_path / "f"
    blocker.write_text("")
    with pytest.raises(OSError):
        emit_csv(r, str(blocker / "out.csv"))
    emit_csv(r, str(tmp_path / "ok.csv"))
    assert (tmp_path / "ok.csv").read_text() == format_csv(r)
