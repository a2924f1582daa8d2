"""End-to-end tests for the command line interface.

Subcommands run in process through ``main(argv)`` so exit codes and
stdout/stderr can be asserted directly; one subprocess test checks the
module entry point wiring.
"""

import json
import subprocess
import sys
from importlib.metadata import entry_points
from pathlib import Path

import numpy as np
import pytest

from netmoment.cli import main
from netmoment.dataio import read_pair_covariates

FIXTURES = Path(__file__).parent / "fixtures"
N_NODES = 12
BETA_STAR = ",".join(["0.2"] * N_NODES)


def _assert_close_json(actual, golden, path="$"):
    """Recursive equality with relative 1e-6 tolerance on floats."""
    if isinstance(golden, float):
        assert actual == pytest.approx(golden, rel=1e-6, abs=1e-12), path
    elif isinstance(golden, dict):
        assert isinstance(actual, dict) and set(actual) == set(golden), path
        for key in golden:
            _assert_close_json(actual[key], golden[key], f"{path}.{key}")
    elif isinstance(golden, list):
        assert isinstance(actual, list) and len(actual) == len(golden), path
        for k, (a, g) in enumerate(zip(actual, golden)):
            _assert_close_json(a, g, f"{path}[{k}]")
    else:
        assert actual == golden, path


@pytest.fixture
def noise_free_files(tmp_path):
    """Exact-mean network files whose fit recovers the written truth."""
    prefix = str(tmp_path / "exact")
    code = main([
        "simulate", "--family", "logistic", "--n", str(N_NODES),
        "--gamma-star", "0.5", "--beta-star", BETA_STAR,
        "--noise-free", "--seed", "3", "--out", prefix,
    ])
    assert code == 0
    return f"{prefix}_edges.csv", f"{prefix}_covariates.csv"


@pytest.fixture
def noisy_files(tmp_path):
    prefix = str(tmp_path / "noisy")
    code = main([
        "simulate", "--family", "logistic", "--n", "16",
        "--gamma-star", "0.4", "--seed", "11", "--out", prefix,
    ])
    assert code == 0
    return f"{prefix}_edges.csv", f"{prefix}_covariates.csv"


class TestSimulate:
    def test_writes_both_files(self, noisy_files):
        edges, covariates = noisy_files
        n, z = read_pair_covariates(covariates)
        assert n == 16
        assert z.shape[1] == 1
        with open(edges) as handle:
            assert handle.readline().strip() == "i,j,weight"

    def test_same_seed_reproduces_files(self, tmp_path):
        args = ["simulate", "--family", "poisson", "--n", "10",
                "--gamma-star", "0.3,-0.2", "--seed", "9"]
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        for name in ("_edges.csv", "_covariates.csv"):
            a = (tmp_path / f"a{name}").read_text()
            b = (tmp_path / f"b{name}").read_text()
            assert a == b

    def test_bad_gamma_star_exits_one(self, tmp_path, capsys):
        code = main(["simulate", "--family", "logistic", "--n", "10",
                     "--gamma-star", "a,b", "--out", str(tmp_path / "x")])
        assert code == 1
        assert "comma-separated numbers" in capsys.readouterr().err

    def test_covariate_width_mismatch_exits_one(self, tmp_path, capsys):
        code = main(["simulate", "--family", "logistic", "--n", "10",
                     "--gamma-star", "0.5", "--covariate-p", "2",
                     "--out", str(tmp_path / "x")])
        assert code == 1
        assert "gamma_star length" in capsys.readouterr().err


class TestFit:
    def test_bundled_noise_free_fixture(self, tmp_path):
        """The committed exact-mean fixture fits cleanly: exit 0 and both
        residual norms at the solver tolerance."""
        out = tmp_path / "fit.json"
        code = main(["fit", "--family", "logistic",
                     "--edges", str(FIXTURES / "noise_free_edges.csv"),
                     "--pair-covariates", str(FIXTURES / "noise_free_covariates.csv"),
                     "--out", str(out)])
        assert code == 0
        result = json.loads(out.read_text())
        assert result["converged"] is True
        assert result["residual_degree"] <= 1e-8
        assert result["residual_covariate"] <= 1e-8
        assert abs(result["gamma"][0] - 0.5) <= 1e-6

    def test_recovers_truth_from_noise_free_files(self, noise_free_files, tmp_path, capsys):
        edges, covariates = noise_free_files
        out = tmp_path / "fit.json"
        code = main(["fit", "--family", "logistic", "--edges", edges,
                     "--pair-covariates", covariates, "--out", str(out)])
        assert code == 0
        result = json.loads(out.read_text())
        assert result["converged"] is True
        assert abs(result["gamma"][0] - 0.5) <= 1e-6
        assert np.abs(np.asarray(result["beta"]) - 0.2).max() <= 1e-6
        assert result["gamma_bc"] is not None

    def test_json_to_stdout(self, noise_free_files, capsys):
        edges, covariates = noise_free_files
        code = main(["fit", "--family", "logistic", "--edges", edges,
                     "--pair-covariates", covariates])
        assert code == 0
        result = json.loads(capsys.readouterr().out)
        assert result["converged"] is True

    def test_csv_to_stdout(self, noise_free_files, capsys):
        edges, covariates = noise_free_files
        code = main(["fit", "--family", "logistic", "--edges", edges,
                     "--pair-covariates", covariates, "--format", "csv"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "parameter,index,estimate,std_error"
        assert len(lines) == 1 + N_NODES + 1 + 1

    def test_no_bias_correct_nulls_fields(self, noise_free_files, tmp_path):
        edges, covariates = noise_free_files
        out = tmp_path / "fit.json"
        code = main(["fit", "--family", "logistic", "--edges", edges,
                     "--pair-covariates", covariates, "--no-bias-correct",
                     "--out", str(out)])
        assert code == 0
        result = json.loads(out.read_text())
        assert result["gamma_bc"] is None
        assert result["bias"] is None

    def test_node_attrs_with_match_transform(self, tmp_path):
        """A fit whose covariate is derived from node attributes recovers a
        truth planted through the same match indicator."""
        from scipy.special import expit
        from netmoment.network import NetworkData, pair_indices
        from netmoment.dataio import write_edges

        n, beta_true, gamma_true = 10, 0.1, 0.7
        groups = np.array([i % 2 for i in range(n)], dtype=float)
        rows, cols = pair_indices(n)
        match = (groups[rows] == groups[cols]).astype(float)
        pi = 2.0 * beta_true + gamma_true * match
        adjacency = np.zeros((n, n))
        adjacency[rows, cols] = expit(pi)
        adjacency[cols, rows] = expit(pi)
        edges = tmp_path / "edges.csv"
        write_edges(str(edges), NetworkData(adjacency, match))
        attrs = tmp_path / "attrs.csv"
        attrs.write_text("i,x1\n" + "".join(f"{i},{groups[i]}\n" for i in range(n)))

        out = tmp_path / "fit.json"
        code = main(["fit", "--family", "logistic", "--edges", str(edges),
                     "--node-attrs", str(attrs), "--transform", "match_indicator",
                     "--out", str(out)])
        assert code == 0
        result = json.loads(out.read_text())
        assert abs(result["gamma"][0] - gamma_true) <= 1e-6

    def test_requires_exactly_one_covariate_source(self, noise_free_files, tmp_path, capsys):
        edges, covariates = noise_free_files
        attrs = tmp_path / "attrs.csv"
        attrs.write_text("i,x1\n0,1.0\n1,2.0\n")
        code = main(["fit", "--family", "logistic", "--edges", edges,
                     "--pair-covariates", covariates,
                     "--node-attrs", str(attrs)])
        assert code == 1
        assert "exactly one covariate source" in capsys.readouterr().err
        code = main(["fit", "--family", "logistic", "--edges", edges])
        assert code == 1

    def test_transform_flag_misuse_exits_one(self, noise_free_files, tmp_path, capsys):
        edges, covariates = noise_free_files
        code = main(["fit", "--family", "logistic", "--edges", edges,
                     "--pair-covariates", covariates,
                     "--transform", "match_indicator"])
        assert code == 1
        attrs = tmp_path / "attrs.csv"
        attrs.write_text("i,x1\n0,1.0\n1,2.0\n")
        code = main(["fit", "--family", "logistic", "--edges", edges,
                     "--node-attrs", str(attrs)])
        assert code == 1
        assert "requires --transform" in capsys.readouterr().err

    def test_malformed_edges_exits_one(self, noise_free_files, tmp_path, capsys):
        _, covariates = noise_free_files
        bad = tmp_path / "bad.csv"
        bad.write_text("from,to,w\n0,1,1\n")
        code = main(["fit", "--family", "logistic", "--edges", str(bad),
                     "--pair-covariates", covariates])
        assert code == 1
        assert "expected header" in capsys.readouterr().err

    def test_saturated_hub_exits_one_naming_node(self, tmp_path, capsys):
        """A star graph pins the hub's degree to its maximum, which the
        degree check rejects before any solving starts."""
        n = 5
        edges = tmp_path / "edges.csv"
        edges.write_text("i,j,weight\n" + "".join(f"{i},0,1.0\n" for i in range(1, n)))
        from netmoment.network import pair_indices
        rows, cols = pair_indices(n)
        covariates = tmp_path / "z.csv"
        covariates.write_text("i,j,z1\n" + "".join(
            f"{i},{j},{float((i + j) % 2)}\n" for i, j in zip(rows, cols)))
        code = main(["fit", "--family", "logistic", "--edges", str(edges),
                     "--pair-covariates", str(covariates)])
        assert code == 1
        err = capsys.readouterr().err
        assert "nodes [0]" in err and "boundary" in err

    def test_non_convergence_exits_two_with_trace(self, noisy_files, tmp_path, capsys):
        edges, covariates = noisy_files
        out = tmp_path / "fail.json"
        code = main(["fit", "--family", "logistic", "--edges", edges,
                     "--pair-covariates", covariates,
                     "--tol-q", "1e-14", "--max-outer", "1", "--out", str(out)])
        assert code == 2
        payload = json.loads(out.read_text())
        assert "error" in payload
        assert len(payload["trace"]) >= 1
        assert "residual_covariate" in payload["trace"][0]

    def test_non_convergence_trace_on_stderr_without_out(self, noisy_files, capsys):
        edges, covariates = noisy_files
        code = main(["fit", "--family", "logistic", "--edges", edges,
                     "--pair-covariates", covariates,
                     "--tol-q", "1e-14", "--max-outer", "1"])
        assert code == 2
        err = capsys.readouterr().err
        payload = json.loads(err[err.index("{"):])
        assert payload["trace"]


class TestMcStudy:
    CONFIG = """\
family = logistic
n_grid = 10, 14
replicates = 2
gamma_star = 0.4
seed = 5
"""

    def test_json_report(self, tmp_path):
        cfg = tmp_path / "study.cfg"
        cfg.write_text(self.CONFIG)
        out = tmp_path / "report.json"
        code = main(["mc-study", "--config", str(cfg), "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["n_grid"] == [10, 14]
        assert len(report["records"]) == 4
        assert report["errors"] == []

    def test_csv_report_to_stdout(self, tmp_path, capsys):
        cfg = tmp_path / "study.cfg"
        cfg.write_text(self.CONFIG)
        code = main(["mc-study", "--config", str(cfg), "--format", "csv"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("spec_index,n,replicate,failed")
        assert len(lines) == 1 + 4

    def test_repeat_runs_are_byte_identical(self, tmp_path):
        cfg = tmp_path / "study.cfg"
        cfg.write_text(self.CONFIG)
        out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["mc-study", "--config", str(cfg), "--out", str(out_a)]) == 0
        assert main(["mc-study", "--config", str(cfg), "--out", str(out_b)]) == 0
        assert out_a.read_text() == out_b.read_text()

    def test_seed_override_changes_records(self, tmp_path):
        cfg = tmp_path / "study.cfg"
        cfg.write_text(self.CONFIG)
        out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["mc-study", "--config", str(cfg), "--out", str(out_a)]) == 0
        assert main(["mc-study", "--config", str(cfg), "--seed", "123",
                     "--out", str(out_b)]) == 0
        a = json.loads(out_a.read_text())
        b = json.loads(out_b.read_text())
        assert a["records"] != b["records"]

    def test_missing_config_exits_one(self, tmp_path, capsys):
        code = main(["mc-study", "--config", str(tmp_path / "absent.cfg")])
        assert code == 1
        assert "cannot open" in capsys.readouterr().err

    def test_matches_golden_report(self, tmp_path, monkeypatch):
        """A fresh run of the committed study config reproduces the frozen
        report; records are worker-count invariant, so the thread cap only
        makes the run hermetic."""
        monkeypatch.setenv("NETMOMENT_THREADS", "1")
        out = tmp_path / "report.json"
        code = main(["mc-study", "--config", str(FIXTURES / "golden_study.cfg"),
                     "--out", str(out)])
        assert code == 0
        fresh = json.loads(out.read_text())
        golden = json.loads((FIXTURES / "golden_study.json").read_text())
        _assert_close_json(fresh, golden)


class TestUsageErrors:
    def test_no_arguments(self, capsys):
        assert main([]) == 1
        assert "error:" in capsys.readouterr().err

    def test_unknown_subcommand(self, capsys):
        assert main(["train"]) == 1

    def test_unknown_flag(self, capsys):
        assert main(["fit", "--family", "logistic", "--edges", "e.csv",
                     "--pair-covariates", "z.csv", "--fast"]) == 1

    def test_bad_choice(self, capsys):
        assert main(["fit", "--family", "gaussian", "--edges", "e.csv",
                     "--pair-covariates", "z.csv"]) == 1


class TestEntryPoints:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "netmoment.cli", "--help"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "fit" in proc.stdout and "mc-study" in proc.stdout

    def test_console_script_registered(self):
        scripts = entry_points(group="console_scripts")
        matches = [ep for ep in scripts if ep.name == "netmoment"]
        assert len(matches) == 1
        assert matches[0].value == "netmoment.cli:main"
