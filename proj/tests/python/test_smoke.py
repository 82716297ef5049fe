import numpy as np
import pytest

import lossperc as lp


def test_lattice_build_and_validate():
    g = lp.build_lattice("hypercubic", 3, 4, ["periodic"])
    assert g.node_count == 64
    assert g.edge_count == 192
    assert g.validate()["pass"]
    edges = g.edges()
    assert edges.shape == (192, 2)
    assert lp.coordination_number("fcc", 3) == 12


def test_bad_arguments_raise():
    with pytest.raises(ValueError):
        lp.ModelParams("model9")
    with pytest.raises(ValueError):
        lp.build_lattice("kagome", 2, 4)


def test_sweep_is_monotone_and_reproducible():
    g = lp.build_lattice("hypercubic", 2, 8)
    p = lp.ModelParams("model2prime")
    a = lp.sweep(g, p, 3)
    b = lp.sweep(g, p, 3)
    assert len(a["largest"]) == a["total_photons"] + 1
    assert np.all(np.diff(a["largest"].astype(np.int64)) >= 0)
    assert np.array_equal(a["largest"], b["largest"])


def test_canonical_curve_against_oracle():
    g = lp.build_lattice("hypercubic", 2, 6)
    p = lp.ModelParams("model1")
    grid = [0.6, 0.9]
    nz = lp.canonical_curve(g, p, grid, 400, seed=1)
    oracle = lp.oracle_curve(g, p, grid, 400, seed=2)
    sigma = np.hypot(nz["largest_error"], oracle["largest_error"])
    assert np.all(np.abs(nz["mean_largest"] - oracle["mean_largest"]) <= 5 * sigma + 1e-9)


def test_convolve_and_identities():
    record = np.arange(101, dtype=float)
    out = lp.convolve(record, [0.25, 0.5])
    assert out == pytest.approx([25.0, 50.0])
    f, s, l = lp.adaptive_probs(1.0, 2)
    assert s == 0.75
    assert f + s + l == pytest.approx(1.0, abs=1e-12)


def test_extrapolate_synthetic():
    sizes = [8.0, 16.0, 32.0]
    values = [0.3 + 0.5 / L for L in sizes]
    fit = lp.extrapolate(sizes, values, [1e-4] * 3)
    assert fit["value"] == pytest.approx(0.3, abs=1e-9)
    assert fit["fit_mode"] == "fixed"


def test_cli_in_process(tmp_path):
    out = str(tmp_path / "curve")
    code, _, err = lp.run_cli(["sweep", "--lattice", "square", "--size", "6", "--reps", "4",
                               "--grid", "0:1:5", "--out", out])
    assert code == 0, err
    assert (tmp_path / "curve.csv").read_text().startswith("# schema=curve v1")
    code, _, _ = lp.run_cli(["sweep", "--model", "nope"])
    assert code == 2
