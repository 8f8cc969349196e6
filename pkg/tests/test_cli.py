import subprocess
import sys

import numpy as np
import pytest

from peristab import cli
from peristab.errors import ConfigurationError


def _meta(path):
    out = {}
    for line in path.read_text().splitlines():
        k, _, v = line.partition("=")
        out[k] = v
    return out


def test_load_config_layers(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[singular-bar]\nalpha = 4\nnodes = 60\n[verify]\nn_max = 5\n")
    p, explicit = cli.load_config("singular-bar", ini, {"m": "0.5"})
    assert p["alpha"] == 4.0 and p["nodes"] == 60 and p["m"] == 0.5
    assert p["horizon_nodes"] == 3
    assert explicit == {"alpha", "nodes", "m"}


def test_load_config_errors(tmp_path):
    ini = tmp_path / "bad.ini"
    ini.write_text("[cuboid]\nstrian = 0.1\n")
    with pytest.raises(ConfigurationError):
        cli.load_config("cuboid", ini)
    with pytest.raises(ConfigurationError):
        cli.load_config("cuboid", tmp_path / "missing.ini")
    with pytest.raises(ConfigurationError):
        cli.load_config("cuboid", None, {"compare_half_dt": "maybe"})
    with pytest.raises(ConfigurationError):
        cli.load_config("plot")


def test_verify_writes_outputs(tmp_path):
    code = cli.main(["verify", "--out", str(tmp_path), "--set", "n_max=6"])
    assert code == cli.EXIT_OK
    meta = _meta(tmp_path / "verify.meta")
    assert meta["command"] == "verify" and meta["param.n_max"] == "6"
    assert "n_min" in meta["defaulted"].split(",")
    assert meta["result.exit_code"] == "0"
    rows = (tmp_path / "verify.csv").read_text().splitlines()
    assert rows[0] == "check,deviation,tolerance,pass"
    assert any(r.startswith("appendix_a_linv,") and r.endswith(",1") for r in rows)


def test_stability_map_files(tmp_path):
    code = cli.main(["stability-map", "--out", str(tmp_path), "--set", "m_samples=7",
                     "--set", "a_samples=25"])
    assert code == cli.EXIT_OK
    for d in (1, 2):
        rows = (tmp_path / f"stability_map_{d}d.csv").read_text().splitlines()
        assert len(rows) == 8 and len(rows[0].split(",")) == 26


def test_dispersion_files(tmp_path):
    code = cli.main(["dispersion", "--out", str(tmp_path), "--set", "k_samples=121"])
    assert code == cli.EXIT_OK
    assert (tmp_path / "dispersion.csv").exists() and (tmp_path / "dispersion_zeros.csv").exists()


def test_config_error_exit_code(tmp_path, capsys):
    assert cli.main(["verify", "--out", str(tmp_path), "--set", "colour=red"]) == cli.EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err
    assert cli.main(["verify", "--out", str(tmp_path), "--set", "n_max"]) == cli.EXIT_CONFIG
    assert cli.main(["verify", "--out", str(tmp_path), "--threads", "0"]) == cli.EXIT_CONFIG
    assert not (tmp_path / "verify.meta").exists()


def test_singular_bar_zero_load(tmp_path):
    code = cli.main(["singular-bar", "--out", str(tmp_path), "--set", "sigma_over_e0=0",
                     "--set", "nodes=60"])
    assert code == cli.EXIT_OK
    meta = _meta(tmp_path / "singular-bar.meta")
    assert meta["result.iterations"] == "0"
    assert float(meta["result.u_linf_rel_error"]) == 0.0


def test_step_size_divergence_exit_code(tmp_path):
    code = cli.main(["step-size", "--out", str(tmp_path), "--set", "strains=-0.001",
                     "--set", "steps=1", "--set", "search_steps=false"])
    assert code == cli.EXIT_DIVERGED
    rows = (tmp_path / "step_size.csv").read_text().splitlines()
    assert len(rows) == 2
    assert _meta(tmp_path / "step-size.meta")["result.exit_code"] == "2"


def test_meta_is_deterministic(tmp_path):
    outs = []
    for sub in ("a", "b"):
        d = tmp_path / sub
        assert cli.main(["stability-map", "--out", str(d), "--set", "m_samples=5",
                         "--set", "a_samples=9"]) == 0
        outs.append(((d / "stability-map.meta").read_text(),
                     (d / "stability_map_2d.csv").read_text()))
    assert outs[0] == outs[1]


def test_singular_analytic_solution():
    x = np.linspace(0.0, 1.0, 11)
    u, e = cli.singular_analytic(x, 10.0)
    assert u[0] == 0.0
    assert np.all(np.diff(u) > 0)
    np.testing.assert_allclose(e[x <= 0.5], 1.0)
    # the local finite-strain solution departs from the linear one at O(sigma)
    gaps = [np.abs(cli.singular_local_finite(x, 10.0, s, 1.0) - u).max() for s in (1e-6, 1e-7)]
    assert 8.0 < gaps[0] / gaps[1] < 13.0
    assert gaps[1] < 1e-4


def test_roughness_of_smooth_field_is_small():
    from peristab import mesh
    nodes = mesh.build_grid(3, [2.0, 1.0, 1.0], 0.25)
    X = nodes.positions
    smooth = np.stack([0.01 * X[:, 0], 0 * X[:, 0], 0 * X[:, 0]], 1)
    rough = smooth.copy()
    rough[:, 1] = 0.01 * (-1.0) ** nodes.indices.sum(axis=1)
    r_s, r_r = cli.roughness(nodes, smooth), cli.roughness(nodes, rough)
    assert r_s.max() < 1e-15
    assert r_r[1] > 1e-2


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "peristab.cli", "verify", "--out", str(tmp_path),
                          "--set", "n_max=4"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "checks =" in res.stdout
