"""End-to-end tests for the command-line interface and file formats."""

import json
from pathlib import Path

import numpy as np
import pytest

from eivgibbs.cli import main
from eivgibbs.errors import ConfigError
from eivgibbs.io import (
    load_config,
    load_dataset,
    read_chain_csv,
    write_chain_csv,
    write_dataset_csv,
)
from eivgibbs.sampler import ChainOutput


def write_config(path: Path, **over) -> Path:
    cfg = {
        "model": {
            "variant": "berkson-x",
            "data": {"inline": {
                "Y": [[1.0], [0.5], [-0.2], [0.8]],
                "X": [[0.1], [0.9], [-0.4], [0.3]],
                "Z": [[1.0], [1.0], [1.0], [1.0]],
                "xvar": 0.5,
            }},
            "priors": {"a0": 3.0, "B0": 1.0, "j0": 0.0, "J0": 10.0},
        },
        "run": {"T": 200, "burn_in": 20, "seed": 11},
        "output": "out",
    }
    for key, val in over.items():
        node = cfg
        *parents, leaf = key.split(".")
        for part in parents:
            node = node[part]
        node[leaf] = val
    path.write_text(json.dumps(cfg))
    return path


# ---------------------------------------------------------------------------
# config loading


def test_load_config_accepts_valid(tmp_path):
    cfg = load_config(write_config(tmp_path / "c.json"))
    assert cfg["model"]["variant"] == "berkson-x"


def test_load_config_rejects_bad_variant_with_field_path(tmp_path):
    path = write_config(tmp_path / "c.json", **{"model.variant": "bogus"})
    with pytest.raises(ConfigError, match=r"\$\['model'\]\['variant'\]"):
        load_config(path)


def test_load_config_rejects_unknown_key(tmp_path):
    path = write_config(tmp_path / "c.json", typo=1)
    with pytest.raises(ConfigError, match="typo"):
        load_config(path)


def test_load_config_rejects_missing_required(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"model": {}, "output": "o"}))
    with pytest.raises(ConfigError, match="run"):
        load_config(path)


def test_load_config_requires_exactly_one_data_source(tmp_path):
    path = write_config(tmp_path / "c.json", **{"model.data.path": "d.csv"})
    with pytest.raises(ConfigError, match="exactly one"):
        load_config(path)
    path2 = write_config(tmp_path / "c2.json")
    cfg = json.loads(path2.read_text())
    del cfg["model"]["data"]["inline"]
    path2.write_text(json.dumps(cfg))
    with pytest.raises(ConfigError, match="exactly one"):
        load_config(path2)


def test_load_config_invalid_json(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(path)


# ---------------------------------------------------------------------------
# dataset CSV


def test_dataset_round_trip_scalar_and_diagonal(tmp_path):
    rng = np.random.default_rng(0)
    Y, X, Z = rng.normal(size=(6, 2)), rng.normal(size=(6, 3)), rng.normal(size=(6, 1))
    xvar = rng.uniform(0.1, 1.0, size=(6, 3))
    path = tmp_path / "d.csv"
    write_dataset_csv(path, Y, X, Z, xvar=xvar, yvar=0.25)
    ds = load_dataset(path)
    np.testing.assert_array_equal(ds["Y"], Y)
    np.testing.assert_array_equal(ds["X"], X)
    np.testing.assert_array_equal(ds["Z"], Z)
    for i in range(6):
        np.testing.assert_array_equal(ds["V"][i], np.diag(xvar[i]))
        np.testing.assert_array_equal(ds["U"][i], 0.25 * np.eye(2))


def test_dataset_ragged_row_reports_line(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("y.1,x.1,z.1,xvar\n1,2,3,0.5\n1,2\n")
    with pytest.raises(ConfigError, match=r"d\.csv:3.*ragged"):
        load_dataset(path)


def test_dataset_non_numeric_reports_location(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("y.1,x.1,z.1,xvar\n1,oops,3,0.5\n")
    with pytest.raises(ConfigError, match=r"d\.csv:2.*'x\.1'.*'oops'"):
        load_dataset(path)


def test_dataset_missing_columns(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("y.1,z.1,xvar\n1,3,0.5\n")
    with pytest.raises(ConfigError, match="no 'x' columns"):
        load_dataset(path)


def test_dataset_nonpositive_variance(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("y.1,x.1,z.1,xvar\n1,2,3,-0.5\n")
    with pytest.raises(ConfigError, match="nonpositive"):
        load_dataset(path)


def test_dataset_sidecar_full_matrices(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("y.1,x.1,x.2,z.1\n1,2,3,1\n4,5,6,1\n")
    cov = np.array([[1.0, 0.3], [0.3, 2.0]])
    side = tmp_path / "d.xvar.csv"
    side.write_text("a,b,c,d\n" + "\n".join(
        ",".join(str(v) for v in cov.ravel()) for _ in range(2)) + "\n")
    ds = load_dataset(path)
    for i in range(2):
        np.testing.assert_array_equal(ds["V"][i], cov)


def test_dataset_sidecar_rejects_non_spd(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("y.1,x.1,x.2,z.1\n1,2,3,1\n")
    side = tmp_path / "d.xvar.csv"
    side.write_text("a,b,c,d\n1,5,5,1\n")  # indefinite
    with pytest.raises(ConfigError, match=r"d\.xvar\.csv: row 1"):
        load_dataset(path)


def test_dataset_rejects_both_encodings(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("y.1,x.1,z.1,xvar\n1,2,3,0.5\n")
    (tmp_path / "d.xvar.csv").write_text("a\n1\n")
    with pytest.raises(ConfigError, match="exactly one encoding"):
        load_dataset(path)


# ---------------------------------------------------------------------------
# chain CSV


def test_chain_csv_exact_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    draws = rng.normal(size=(40, 3)) * np.array([1e-9, 1.0, 1e12])
    out = ChainOutput(draws=draws, labels=["a", "b", "c"], seed=5,
                      T=50, burn_in=10, thin=1, variant="berkson-x",
                      dims={"n": 4})
    path = tmp_path / "chain.csv"
    write_chain_csv(path, out, provenance={"extra": "note"})
    back, labels, prov = read_chain_csv(path)
    np.testing.assert_array_equal(back, draws)  # bitwise via 17 sig digits
    assert labels == ["a", "b", "c"]
    assert prov["seed"] == 5 and prov["extra"] == "note"
    assert prov["variant"] == "berkson-x" and prov["dims"] == {"n": 4}


# ---------------------------------------------------------------------------
# CLI subcommands


def test_run_is_byte_identical_on_rerun(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json")
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["run", str(cfg), "--out", str(out1)]) == 0
    assert main(["run", str(cfg), "--out", str(out2)]) == 0
    a = (out1 / "chain_r1.csv").read_bytes()
    b = (out2 / "chain_r1.csv").read_bytes()
    assert a == b
    report = json.loads((out1 / "run_report.json").read_text())
    assert report["chains"] == ["chain_r1.csv"]
    assert report["stored_rows"] == [180]  # T=200 minus burn_in=20


def test_run_replicates_and_overrides(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json")
    out = tmp_path / "o"
    assert main(["run", str(cfg), "--out", str(out), "--replicates", "2",
                 "--T", "100", "--burn-in", "0", "--seed", "3"]) == 0
    d1, _, p1 = read_chain_csv(out / "chain_r1.csv")
    d2, _, p2 = read_chain_csv(out / "chain_r2.csv")
    assert d1.shape == d2.shape == (100, d1.shape[1])
    assert p1["seed"] == 3 and p2["seed"] == 4
    assert not np.array_equal(d1, d2)


def test_simulate_then_run_via_dataset_path(tmp_path, capsys):
    sim = tmp_path / "sim"
    assert main(["simulate", "scaling", "--n", "20", "--m", "1", "--p", "2",
                 "--seed", "9", "--out", str(sim)]) == 0
    truth = json.loads((sim / "groundtruth.json").read_text())
    assert np.asarray(truth["Sigma"]).shape == (1, 1)
    cfg_path = write_config(tmp_path / "c.json")
    cfg = json.loads(cfg_path.read_text())
    cfg["model"]["data"] = {"path": str(sim / "dataset.csv")}
    cfg["model"]["priors"]["j0"] = 0.0
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "o"
    assert main(["run", str(cfg_path), "--out", str(out)]) == 0
    draws, labels, _ = read_chain_csv(out / "chain_r1.csv")
    assert sum(lab.startswith("gamma.beta.") for lab in labels) == 2


def test_diagnose_iid_chain(tmp_path, capsys):
    rng = np.random.default_rng(2)
    T = 20000
    draws = rng.normal(size=(T, 2))
    out = ChainOutput(draws=draws, labels=["u", "v"], seed=0, T=T,
                      burn_in=0, thin=1)
    chain = tmp_path / "chain.csv"
    write_chain_csv(chain, out)
    report = tmp_path / "diag.json"
    assert main(["diagnose", str(chain), "--out", str(report)]) == 0
    payload = json.loads(report.read_text())
    assert 0.9 * T <= payload["mess"] <= 1.1 * T
    assert payload["chain_provenance"]["T"] == T


def test_diagnose_coords_filter(tmp_path, capsys):
    rng = np.random.default_rng(3)
    draws = rng.normal(size=(500, 3))
    out = ChainOutput(draws=draws, labels=["gamma.beta.1.1", "gamma.theta.1.1",
                                           "logdetSigma"],
                      seed=0, T=500, burn_in=0, thin=1)
    chain = tmp_path / "chain.csv"
    write_chain_csv(chain, out)
    report = tmp_path / "diag.json"
    assert main(["diagnose", str(chain), "--coords", "gamma.beta.",
                 "--out", str(report)]) == 0
    payload = json.loads(report.read_text())
    assert payload["labels"] == ["gamma.beta.1.1"]


def test_diagnose_bad_coords_errors(tmp_path, capsys):
    rng = np.random.default_rng(3)
    out = ChainOutput(draws=rng.normal(size=(100, 1)), labels=["a"],
                      seed=0, T=100, burn_in=0, thin=1)
    chain = tmp_path / "chain.csv"
    write_chain_csv(chain, out)
    assert main(["diagnose", str(chain), "--coords", "nope"]) == 1
    err = capsys.readouterr().err
    payload = json.loads(err)
    assert payload["error"] == "ConfigError"
    assert "nope" in payload["message"]


def test_error_is_json_on_stderr(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.json")]) == 1
    err = capsys.readouterr().err
    payload = json.loads(err)
    assert payload["error"] in ("FileNotFoundError", "ConfigError")


def test_validate_small_model_passes(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json")
    report = tmp_path / "val.json"
    assert main(["validate", str(cfg), "--iterations", "1500",
                 "--seed", "4", "--out", str(report)]) == 0
    payload = json.loads(report.read_text())
    assert payload["passed"] is True
    assert payload["geweke"]["fraction_within_4"] >= 0.95
    assert all(c["passed"] for c in payload["identities"].values())


def test_experiment_fig3_outputs(tmp_path, capsys):
    out = tmp_path / "fig3"
    assert main(["experiment", "fig3", "--T", "800", "--seed", "1",
                 "--out", str(out)]) == 0
    acf = (out / "fig3_acf.csv").read_text().splitlines()
    assert acf[1] == "lag,alpha,beta,sigma2"
    assert len(acf) == 2 + 21  # provenance + header + lags 0..20
    summary = (out / "fig3_summary.csv").read_text().splitlines()
    assert summary[1] == "param,mean,mcse,ess"
    assert len(summary) == 2 + 3
    draws, labels, _ = read_chain_csv(out / "fig3_chain.csv")
    assert draws.shape[0] == 800 - 80


def test_experiment_fig1_summary_shape(tmp_path, capsys):
    out = tmp_path / "fig1"
    assert main(["experiment", "fig1", "--T", "300", "--replicates", "2",
                 "--seed", "1", "--out", str(out)]) == 0
    lines = (out / "fig1_summary.csv").read_text().splitlines()
    header = lines[1].split(",")
    assert header[:4] == ["config", "m", "p", "replicate"]
    assert {"mess", "se_sqrt_eig_min", "se_sqrt_eig_max"} <= set(header)
    assert len(lines) == 2 + 3 * 2  # three configs x two replicates
