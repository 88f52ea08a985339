"""Tests for the command-line interface."""

import csv
import json
import logging

import pytest
import yaml

import main
from graph import read_edge_list, write_edge_list
from utils.errors import DiscoveryError


@pytest.fixture(autouse=True)
def quiet_cli(mocker):
    """Keep the CLI from replacing pytest's log handlers and signal handlers."""
    mocker.patch("main.setup_logging")
    mocker.patch("main.install_signal_handlers")


@pytest.fixture
def graph_file(tmp_path, worked_dag):
    path = tmp_path / "g.txt"
    write_edge_list(worked_dag, path)
    return path


class TestParser:
    """Tests for argument parsing."""

    def test_command_required(self):
        """Test that a missing subcommand exits with usage."""
        with pytest.raises(SystemExit):
            main.build_parser().parse_args([])

    def test_density_options_exclusive(self):
        """Test --density and --m cannot be combined."""
        with pytest.raises(SystemExit):
            main.build_parser().parse_args(
                ["generate", "--family", "er", "--p", "5", "--density", "1", "--m", "2", "--out", "g"])

    def test_bench_defaults(self):
        """Test bench defaults to config.yaml and non-strict mode."""
        args = main.build_parser().parse_args(["bench"])
        assert args.config.name == "config.yaml"
        assert args.strict is False


class TestCommands:
    """Tests for each subcommand through main()."""

    def test_cpdag_prints_essential_graph(self, tmp_path, capsys):
        """Test the chain prints as undirected edges."""
        path = tmp_path / "chain.txt"
        path.write_text("p=3\n0 -> 1\n1 -> 2\n")

        assert main.main(["cpdag", "--graph", str(path)]) == 0
        assert capsys.readouterr().out == "p=3\n0 -- 1\n1 -- 2\n"

    def test_cpdag_to_file(self, tmp_path, graph_file):
        """Test --out writes the edge list."""
        out = tmp_path / "e.txt"
        assert main.main(["cpdag", "--graph", str(graph_file), "--out", str(out)]) == 0
        assert len(read_edge_list(out).directed) == 5

    def test_generate_then_discover(self, tmp_path, capsys):
        """Test a generated graph is recovered by the oracle run."""
        graph = tmp_path / "g.txt"
        out = tmp_path / "result.json"
        assert main.main(["generate", "--family", "er", "--p", "8", "--density", "2",
                          "--seed", "3", "--out", str(graph)]) == 0
        assert main.main(["discover", "--algo", "gas", "--tester", "oracle",
                          "--graph", str(graph), "--out", str(out), "--trace"]) == 0

        result = json.loads(out.read_text())
        assert result["shd_to_truth"] == 0
        assert result["algo"] == "gas"
        assert result["p"] == 8
        assert "expansions" in result
        assert "distinct CI tests" in capsys.readouterr().out

    def test_generate_writes_weights_and_samples(self, tmp_path):
        """Test the SEM sidecar files."""
        weights, samples = tmp_path / "w.txt", tmp_path / "d.csv"
        assert main.main(["generate", "--family", "ba", "--p", "6", "--m", "1",
                          "--out", str(tmp_path / "g.txt"), "--weights", str(weights),
                          "--samples", str(samples), "--n", "20"]) == 0

        assert len(weights.read_text().splitlines()) == 5
        assert len(samples.read_text().splitlines()) == 21

    def test_discover_from_data(self, tmp_path):
        """Test a Fisher-z run on a CSV file records the variable names."""
        graph, samples = tmp_path / "g.txt", tmp_path / "d.csv"
        main.main(["generate", "--family", "parallel", "--p", "5", "--out", str(graph),
                   "--samples", str(samples), "--n", "2000"])
        out = tmp_path / "result.json"

        assert main.main(["discover", "--algo", "gas+", "--tester", "fisherz",
                          "--data", str(samples), "--out", str(out)]) == 0
        result = json.loads(out.read_text())
        assert result["variables"] == ["X0", "X1", "X2", "X3", "X4"]
        assert "shd_to_truth" not in result

    def test_discover_with_weights_file(self, tmp_path):
        """Test that --weights samples from the given SEM."""
        graph, weights = tmp_path / "g.txt", tmp_path / "w.txt"
        main.main(["generate", "--family", "er", "--p", "6", "--density", "2", "--seed", "5",
                   "--out", str(graph), "--weights", str(weights)])
        common = ["discover", "--algo", "gas", "--tester", "fisherz", "--graph", str(graph),
                  "--seed", "5", "--n", "3000"]

        assert main.main(common + ["--weights", str(weights), "--out", str(tmp_path / "a.json")]) == 0
        assert main.main(common + ["--out", str(tmp_path / "b.json")]) == 0

        with_file = json.loads((tmp_path / "a.json").read_text())
        drawn = json.loads((tmp_path / "b.json").read_text())
        assert with_file["edges"] == drawn["edges"]
        assert with_file["distinct_ci"] == drawn["distinct_ci"]

    def test_discover_rejects_mismatched_weights(self, tmp_path, graph_file):
        """Test that weights for other edges fail with exit code 1."""
        weights = tmp_path / "w.txt"
        weights.write_text("0 1 0.5\n")

        assert main.main(["discover", "--algo", "gas", "--tester", "fisherz",
                          "--graph", str(graph_file), "--weights", str(weights),
                          "--out", str(tmp_path / "r.json")]) == 1

    def test_oracle_needs_graph(self, tmp_path, caplog):
        """Test that the oracle with --data fails with exit code 1."""
        data = tmp_path / "d.csv"
        data.write_text("a,b\n1,2\n")

        assert main.main(["discover", "--algo", "gas", "--tester", "oracle",
                          "--data", str(data), "--out", str(tmp_path / "r.json")]) == 1
        assert "needs --graph" in caplog.text

    def test_er_needs_density(self, tmp_path):
        """Test that ER without a density fails cleanly."""
        assert main.main(["generate", "--family", "er", "--p", "5",
                          "--out", str(tmp_path / "g.txt")]) == 1

    def test_missing_graph_file(self, tmp_path):
        """Test that a missing input file gives exit code 1."""
        assert main.main(["cpdag", "--graph", str(tmp_path / "absent.txt")]) == 1

    def test_verify_lb(self, capsys):
        """Test the certificate table for a 3-clique."""
        assert main.main(["verify-lb", "--s", "3"]) == 0
        out = capsys.readouterr().out
        assert "4 traces" in out
        assert "CERTIFIED" in out

    def test_verify_lb_out_of_range(self):
        """Test that an unsupported clique size fails."""
        assert main.main(["verify-lb", "--s", "9"]) == 1


class TestBenchCommand:
    """Tests for the bench subcommand."""

    def test_bench_writes_outputs(self, config_file, tmp_path):
        """Test a clean sweep exits 0 and writes its files."""
        out = tmp_path / "bench"
        assert main.main(["bench", "--config", str(config_file), "--output-dir", str(out),
                          "--no-progress"]) == 0
        assert (out / "results.csv").exists()
        assert (out / "checkpoint.json").exists()

    def test_strict_fails_on_errors(self, config_file, tmp_path, mocker):
        """Test --strict turns a failed cell into exit code 1."""
        mocker.patch.dict("matrix_runner.ALGORITHMS",
                          {"pc": mocker.Mock(side_effect=DiscoveryError("boom"))})
        args = ["bench", "--config", str(config_file), "--output-dir", str(tmp_path / "b"),
                "--no-progress"]

        assert main.main(args) == 0
        assert main.main(args + ["--strict", "--resume", str(tmp_path / "fresh.json")]) == 1

    def test_interrupt_returns_130(self, config_file, tmp_path, mocker):
        """Test that a shutdown request yields exit code 130."""
        mocker.patch("matrix_runner.is_shutdown_requested", return_value=True)

        assert main.main(["bench", "--config", str(config_file),
                          "--output-dir", str(tmp_path / "b"), "--no-progress"]) == 130

    def test_rerun_with_new_sample_size(self, tmp_path):
        """Test that a second sweep into the same directory uses the new n."""
        config, out = tmp_path / "config.yaml", tmp_path / "bench"
        experiment = {"family": "er", "sizes": [5], "densities": [1], "seeds": [0],
                      "algos": ["gas"], "testers": ["fisherz"], "n": 500}
        for n in (500, 2000):
            config.write_text(yaml.dump({"experiment": {**experiment, "n": n}}))
            assert main.main(["bench", "--config", str(config), "--output-dir", str(out),
                              "--no-progress"]) == 0

        with open(out / "results.csv", newline="") as f:
            rows = list(csv.DictReader(f))
        assert [row["n"] for row in rows] == ["2000"]

    def test_checkpoint_can_be_disabled(self, tmp_path):
        """Test that advanced.checkpoint: false writes no checkpoint."""
        config, out = tmp_path / "config.yaml", tmp_path / "bench"
        config.write_text(yaml.dump({
            "experiment": {"family": "er", "sizes": [4], "densities": [1], "seeds": [0],
                           "algos": ["gas"]},
            "advanced": {"checkpoint": False},
        }))

        assert main.main(["bench", "--config", str(config), "--output-dir", str(out),
                          "--no-progress"]) == 0
        assert (out / "results.csv").exists()
        assert not (out / "checkpoint.json").exists()

    def test_config_logging_section(self, tmp_path):
        """Test that bench applies logging.level and logging.file from its config."""
        config = tmp_path / "config.yaml"
        config.write_text(yaml.dump({
            "experiment": {"family": "er", "sizes": [4], "densities": [1], "seeds": [0],
                           "algos": ["gas"]},
            "logging": {"level": "DEBUG", "file": str(tmp_path / "bench.log")},
        }))

        main.main(["bench", "--config", str(config), "--output-dir", str(tmp_path / "b"),
                   "--no-progress"])

        kwargs = main.setup_logging.call_args.kwargs
        assert kwargs["level"] == "DEBUG"
        assert kwargs["log_file"] == tmp_path / "bench.log"

    def test_log_level_flag_wins(self, tmp_path):
        """Test that --log-level overrides the config's logging level."""
        config = tmp_path / "config.yaml"
        config.write_text(yaml.dump({
            "experiment": {"family": "er", "sizes": [4], "densities": [1], "seeds": [0],
                           "algos": ["gas"]},
            "logging": {"level": "DEBUG"},
        }))

        main.main(["--log-level", "WARNING", "bench", "--config", str(config),
                   "--output-dir", str(tmp_path / "b"), "--no-progress"])

        assert main.setup_logging.call_args.kwargs["level"] == "WARNING"
        assert main.setup_logging.call_args.kwargs["log_file"] is None


class TestSetupLogging:
    """Tests for logging setup."""

    def test_log_file(self, tmp_path, mocker):
        """Test that a log file handler is installed at the requested level."""
        mocker.stopall()
        basic_config = mocker.patch("main.logging.basicConfig")
        main.setup_logging("DEBUG", tmp_path / "run.log")

        kwargs = basic_config.call_args.kwargs
        assert kwargs["level"] == logging.DEBUG
        assert kwargs["force"] is True
        assert any(isinstance(h, logging.FileHandler) for h in kwargs["handlers"])
        for handler in kwargs["handlers"]:
            handler.close()
