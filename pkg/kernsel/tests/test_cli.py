"""
End-to-end tests of the kernsel command line.
"""
import json

import pandas as pd
import pytest

from kernsel.business.criterion import ExplicitTable, MinimalPlusKappa, OptimalTheoretical
from kernsel.business.densities import StdGaussian, Uniform01
from kernsel.cli.options import parse_bandwidths, parse_int_grid, parse_penalty, resolve_penalty
from kernsel.config.config_manager import SEED_ENV_VAR
from kernsel.dal.sample_io import read_sample, write_sample
from kernsel.errors import ConfigurationError
from kernsel.main import EXIT_CONFIG, EXIT_DATA, EXIT_OK, main
from kernsel.utils.rng import derive_seed


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)


@pytest.fixture
def gaussian_file(tmp_path):
    return write_sample(str(tmp_path / "gaussian.txt"), StdGaussian().sample(100, 12345))


def load_manifest(directory, command):
    return json.loads((directory / f"{command}_manifest.json").read_text(encoding="utf-8"))


class TestOptions:

    def test_parse_penalty(self):
        assert isinstance(parse_penalty("optimal"), OptimalTheoretical)
        rule = parse_penalty("kappa:0.5")
        assert isinstance(rule, MinimalPlusKappa) and rule.kappa == 0.5
        assert resolve_penalty(parse_penalty("zero"), 3).values == (0.0, 0.0, 0.0)
        assert parse_penalty("table:1,2.5").values == (1.0, 2.5)

    @pytest.mark.parametrize("spec", ["kappa:", "kappa:abc", "optimal:1", "bic", "table:"])
    def test_parse_penalty_rejects(self, spec):
        with pytest.raises(ConfigurationError):
            parse_penalty(spec)

    def test_grids(self):
        assert len(parse_bandwidths("reciprocal")) == 50
        assert parse_bandwidths("reciprocal:2") == pytest.approx([0.5, 0.25])
        assert parse_int_grid("2..n", "dims", upper=5) == [2, 3, 4, 5]
        assert parse_int_grid("1,4,9", "dims") == [1, 4, 9]
        with pytest.raises(ConfigurationError):
            parse_bandwidths("0.1,-0.2")
        with pytest.raises(ConfigurationError):
            parse_int_grid("1..n", "dims")
        with pytest.raises(ConfigurationError):
            parse_int_grid("1.5,2", "dims")


class TestSelectCommand:

    def test_select_writes_tables(self, tmp_path, gaussian_file, capsys):
        out = tmp_path / "out"
        assert main(["select", "--input", gaussian_file, "--output-dir", str(out)]) == EXIT_OK
        selection = pd.read_csv(out / "selection.csv")
        assert len(selection) == 50
        assert selection["selected_flag"].sum() == 1
        assert len(pd.read_csv(out / "estimate.csv")) == 201
        assert load_manifest(out, "select")["outputs"] == ["selection.csv", "estimate.csv"]
        assert capsys.readouterr().out.startswith("selected kernel_index=")

    def test_kappa_penalty_and_histogram(self, tmp_path):
        path = write_sample(str(tmp_path / "tri.txt"), Uniform01().sample(40, 1))
        out = tmp_path / "hist"
        code = main(["select", "--input", path, "--family", "histogram", "--dims", "1..10",
                     "--penalty", "kappa:0.5", "--output-dir", str(out)])
        assert code == EXIT_OK
        manifest = load_manifest(out, "select")
        assert manifest["config"]["command"]["family_size"] == 10

    def test_malformed_input_is_a_data_error(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("0.1\nnot-a-number\n", encoding="utf-8")
        assert main(["select", "--input", str(bad), "--output-dir", str(tmp_path / "o")]) == EXIT_DATA
        assert main(["select", "--input", str(tmp_path / "absent.txt")]) == EXIT_DATA

    def test_histogram_on_real_line_data(self, gaussian_file, tmp_path):
        code = main(["select", "--input", gaussian_file, "--family", "histogram",
                     "--output-dir", str(tmp_path / "o")])
        assert code == EXIT_DATA

    def test_bad_penalty_is_a_config_error(self, gaussian_file, tmp_path):
        code = main(["select", "--input", gaussian_file, "--penalty", "kappa:x", "--output-dir", str(tmp_path)])
        assert code == EXIT_CONFIG


class TestSweepCommand:

    ARGS = ["sweep", "--n", "30", "--reps", "2", "--seed", "4", "--h-grid", "0.1,0.3,0.5", "--a", "0"]

    def test_sweep_rows_and_determinism(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        assert main(self.ARGS + ["--output-dir", str(first)]) == EXIT_OK
        assert main(self.ARGS + ["--output-dir", str(second)]) == EXIT_OK
        assert len(pd.read_csv(first / "sweep.csv")) == 41 * 2
        assert len(pd.read_csv(first / "sweep_summary.csv")) == 41
        assert (first / "sweep.csv").read_bytes() == (second / "sweep.csv").read_bytes()
        manifest = load_manifest(first, "sweep")
        assert manifest["master_seed"] == 4
        assert manifest["notes"]["setting_sources"]["n"] == "flag"
        assert manifest["notes"]["setting_sources"]["kappa_num"] == "default"
        assert [t["a"] for t in manifest["notes"]["phase_transitions"]] == [0.0]

    def test_several_a_values_share_one_sweep(self, tmp_path):
        out = tmp_path / "m"
        args = self.ARGS[:-2] + ["--a", "0,3", "--kappas", "-1,1", "--output-dir", str(out)]
        assert main(args) == EXIT_OK
        rows = pd.read_csv(out / "sweep.csv")
        assert list(rows.columns[:2]) == ["a", "kappa"]
        assert len(rows) == 2 * 2 * 2
        assert sorted(rows["a"].unique().tolist()) == [0.0, 3.0]
        assert len(pd.read_csv(out / "sweep_summary.csv")) == 4
        transitions = load_manifest(out, "sweep")["notes"]["phase_transitions"]
        assert [t["a"] for t in transitions] == [0.0, 3.0]
        # each a value reuses the replication samples
        replications = rows.groupby("a")["replication"].apply(list)
        assert replications.loc[0.0] == replications.loc[3.0] == [0, 0, 1, 1]

    def test_kappa_grid_from_config(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"experiments": {"kappa_min": -0.5, "kappa_max": 0.5, "kappa_num": 3}}),
                          encoding="utf-8")
        out = tmp_path / "c"
        assert main(self.ARGS + ["--config", str(config), "--output-dir", str(out)]) == EXIT_OK
        summary = pd.read_csv(out / "sweep_summary.csv")
        assert summary["kappa"].tolist() == [-0.5, 0.0, 0.5]
        assert load_manifest(out, "sweep")["notes"]["setting_sources"]["kappa_min"] == "config"

    def test_explicit_kappas(self, tmp_path):
        out = tmp_path / "k"
        assert main(self.ARGS + ["--kappas", "-0.5,1", "--output-dir", str(out)]) == EXIT_OK
        assert len(pd.read_csv(out / "sweep.csv")) == 4

    def test_bias_dominant_beta_out_of_range(self, tmp_path):
        code = main(["sweep", "--scenario", "bias-dominant", "--beta", "0.4", "--output-dir", str(tmp_path)])
        assert code == EXIT_CONFIG

    @pytest.mark.parametrize("extra", [["--scenario", "histogram", "--h-grid", "0.1"],
                                       ["--scenario", "histogram", "--a", "1"],
                                       ["--a", "-1"],
                                       ["--a", "0,0"],
                                       ["--dims", "1..3"],
                                       ["--scenario", "nope"],
                                       ["--reps", "0"]])
    def test_invalid_settings(self, tmp_path, extra):
        assert main(["sweep", "--n", "10", "--output-dir", str(tmp_path)] + extra) == EXIT_CONFIG


class TestDiagnoseCommand:

    def test_diagnose_report(self, tmp_path, capsys):
        path = write_sample(str(tmp_path / "u.txt"), Uniform01().sample(30, 8))
        out = tmp_path / "d"
        code = main(["diagnose", "--input", path, "--density", "uniform", "--family", "histogram",
                     "--dims", "1,2,4", "--output-dir", str(out)])
        assert code == EXIT_OK
        report = json.loads((out / "diagnostics.json").read_text(encoding="utf-8"))
        assert report["n"] == 30
        assert len(report["kernels"]) == 3
        assert report["kernels"][0]["true_risk"] == pytest.approx(0.0, abs=1e-8)
        assert all(abs(k["ustat_residual"]) <= 1e-6 for k in report["kernels"])
        assert "max |ustat residual|" in capsys.readouterr().out

    def test_density_is_required(self, gaussian_file, tmp_path):
        assert main(["diagnose", "--input", gaussian_file, "--output-dir", str(tmp_path)]) == EXIT_CONFIG

    def test_family_density_mismatch(self, gaussian_file, tmp_path):
        code = main(["diagnose", "--input", gaussian_file, "--density", "std-gaussian", "--family", "histogram",
                     "--dims", "1..3", "--output-dir", str(tmp_path)])
        assert code == EXIT_CONFIG


class TestSampleCommand:

    def test_sample_round_trip(self, tmp_path):
        out = tmp_path / "s"
        assert main(["sample", "--density", "uniform", "--n", "20", "--seed", "3",
                     "--output-dir", str(out)]) == EXIT_OK
        sample = read_sample(str(out / "sample.txt"))
        expected = Uniform01().sample(20, derive_seed(3, 0))
        assert sample.values.tolist() == expected.values.tolist()
        assert load_manifest(out, "sample")["outputs"] == ["sample.txt"]

    def test_seed_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "3")
        out = tmp_path / "env"
        assert main(["sample", "--density", "uniform", "--n", "20", "--replication", "2",
                     "--output-dir", str(out)]) == EXIT_OK
        sample = read_sample(str(out / "sample.txt"))
        assert sample.values.tolist() == Uniform01().sample(20, derive_seed(3, 2)).values.tolist()
        manifest = load_manifest(out, "sample")
        assert manifest["master_seed"] == 3
        assert manifest["notes"]["setting_sources"]["master_seed"] == "env"

    def test_unknown_density_and_negative_replication(self, tmp_path):
        assert main(["sample", "--density", "cauchy", "--output-dir", str(tmp_path)]) == EXIT_CONFIG
        assert main(["sample", "--density", "uniform", "--replication", "-1",
                     "--output-dir", str(tmp_path)]) == EXIT_CONFIG
