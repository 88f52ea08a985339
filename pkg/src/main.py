"""CLI entry point for the ancestral search toolkit.

Subcommands generate synthetic graphs and data, run a discovery algorithm on
a graph or a data file, run benchmark sweeps, certify the CI-test lower
bound, and print the essential graph of a DAG.
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional

from shutdown import install_signal_handlers

VERSION = "0.1.0"

logger = logging.getLogger("main")


def setup_logging(level: str = "INFO", log_file: Optional[Path] = None):
    """Configure logging for the application.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional path to log file
    """
    handlers: List[logging.Handler] = [logging.StreamHandler()]

    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format="%(asctime)s [%(levelname)8s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        handlers=handlers,
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser.

    Returns:
        Configured parser with one subparser per command
    """
    parser = argparse.ArgumentParser(
        prog="ancestral-search",
        description="""
Ancestral Search Toolkit - learn essential graphs from conditional independence tests

Greedy ancestral search (GAS, GAS+) and a PC-stable baseline over a
d-separation oracle or a Fisher-z test on Gaussian data, with synthetic
generators, benchmark sweeps and a constructive lower-bound check.
        """,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Random ER graph with expected neighbourhood size 3, plus 5000 samples
  %(prog)s generate --family er --p 12 --density 3 --seed 7 --out g.txt \\
      --weights w.txt --samples d.csv --n 5000

  # Learn with GAS from the d-separation oracle of a known graph
  %(prog)s discover --algo gas --tester oracle --graph g.txt --out result.json

  # Learn with GAS+ from data
  %(prog)s discover --algo gas+ --tester fisherz --data d.csv --alpha 0.01 --out result.json

  # Benchmark sweep from a config file, failing on any cell error
  %(prog)s bench --config config.yaml --output-dir results --strict

  # Certify the lower bound for a 4-clique
  %(prog)s verify-lb --s 4

  # Essential graph of a DAG
  %(prog)s cpdag --graph g.txt
        """
    )

    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Logging level (default: INFO, or logging.level of a bench config)"
    )
    parser.add_argument("--log-file", type=Path, help="Also write logs to this file")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")

    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="Generate a random DAG (and optional SEM data)")
    gen.add_argument("--family", choices=["er", "ba", "parallel"], required=True)
    gen.add_argument("--p", type=int, required=True, help="Number of nodes")
    density = gen.add_mutually_exclusive_group()
    density.add_argument("--density", type=float, help="ER expected neighbourhood size k")
    density.add_argument("--edge-prob", type=float, help="ER edge probability q")
    density.add_argument("--m", type=int, help="Barabasi-Albert attachment count")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, required=True, help="Edge-list output file")
    gen.add_argument("--weights", type=Path, help="Write SEM weights sidecar here")
    gen.add_argument("--samples", type=Path, help="Write SEM samples (CSV) here")
    gen.add_argument("--n", type=int, default=10000, help="Sample count (default: 10000)")

    disc = sub.add_parser("discover", help="Run a discovery algorithm")
    disc.add_argument("--algo", choices=["gas", "gas+", "pc"], required=True)
    disc.add_argument("--tester", choices=["oracle", "fisherz"], required=True)
    source = disc.add_mutually_exclusive_group(required=True)
    source.add_argument("--graph", type=Path, help="Ground-truth DAG in edge-list format")
    source.add_argument("--data", type=Path, help="CSV sample matrix")
    disc.add_argument("--alpha", type=float, default=0.05, help="Significance level (default: 0.05)")
    disc.add_argument("--seed", type=int, default=0, help="Seed for sampling data from --graph")
    disc.add_argument("--n", type=int, default=10000, help="Samples drawn from --graph for fisherz")
    disc.add_argument("--weights", type=Path,
                      help="SEM weights for sampling --graph data (default: random from --seed)")
    disc.add_argument("--out", type=Path, required=True, help="Result JSON file")
    disc.add_argument("--trace", action="store_true", help="Include the expansion trace in the JSON")

    bench = sub.add_parser("bench", help="Run a benchmark sweep")
    bench.add_argument("--config", type=Path, default=Path("config.yaml"),
                       help="Benchmark config, YAML or key=value (default: config.yaml)")
    bench.add_argument("--output-dir", type=Path, help="Output directory (overrides config)")
    bench.add_argument("--strict", action="store_true", help="Exit nonzero if any cell failed")
    bench.add_argument("--resume", type=Path, help="Resume from checkpoint file")
    bench.add_argument("--no-progress", action="store_true", help="Hide the progress bar")

    lb = sub.add_parser("verify-lb", help="Certify the CI-test lower bound for an s-clique")
    lb.add_argument("--s", type=int, required=True, help="Clique size (2..6)")

    cp = sub.add_parser("cpdag", help="Print the essential graph of a DAG")
    cp.add_argument("--graph", type=Path, required=True)
    cp.add_argument("--out", type=Path, help="Write to file instead of stdout")

    return parser


# ============================================================================
# Commands
# ============================================================================

def cmd_generate(args) -> int:
    from citest.data import write_data_csv
    from graph import write_edge_list
    from synth import (barabasi_albert_dag, erdos_renyi_dag, parallel_paths_dag,
                       random_sem, sample_sem, write_weights)
    from matrix_runner import SAMPLE_STREAM, WEIGHT_STREAM, derive_seed
    from utils.errors import ConfigurationError

    if args.family == "er":
        if args.edge_prob is not None:
            dag = erdos_renyi_dag(args.p, edge_prob=args.edge_prob, seed=args.seed)
        elif args.density is not None:
            dag = erdos_renyi_dag(args.p, expected_neighbors=args.density, seed=args.seed)
        else:
            raise ConfigurationError("ER family needs --density or --edge-prob")
    elif args.family == "ba":
        if args.m is None:
            raise ConfigurationError("BA family needs --m")
        dag = barabasi_albert_dag(args.p, args.m, seed=args.seed)
    else:
        dag = parallel_paths_dag(args.p)

    write_edge_list(dag, args.out)
    logger.info(f"Wrote DAG with {dag.p} nodes and {len(dag.edges)} edges to {args.out}")

    if args.weights or args.samples:
        model = random_sem(dag, seed=derive_seed(args.seed, WEIGHT_STREAM))
        if args.weights:
            write_weights(model, args.weights)
            logger.info(f"Wrote weights to {args.weights}")
        if args.samples:
            data = sample_sem(model, args.n, seed=derive_seed(args.seed, SAMPLE_STREAM))
            write_data_csv(data, args.samples)

    return 0


def cmd_discover(args) -> int:
    from citest import get_tester
    from citest.data import read_data_csv
    from cpdag import essential_graph, shd
    from graph import format_edge_list, read_dag
    from matrix_runner import ALGORITHMS, SAMPLE_STREAM, WEIGHT_STREAM, derive_seed
    from synth import random_sem, read_weights, sample_sem
    from utils.errors import ConfigurationError
    from utils.format import format_duration, format_table

    truth = None
    names = None
    if args.graph:
        dag = read_dag(args.graph)
        truth = essential_graph(dag)
        if args.tester == "oracle":
            tester = get_tester("oracle", dag)
        else:
            if args.weights:
                model = read_weights(dag, args.weights)
            else:
                model = random_sem(dag, seed=derive_seed(args.seed, WEIGHT_STREAM))
            data = sample_sem(model, args.n, seed=derive_seed(args.seed, SAMPLE_STREAM))
            tester = get_tester("fisherz", data, alpha=args.alpha)
        p = dag.p
    else:
        if args.tester == "oracle":
            raise ConfigurationError("The oracle tester needs --graph")
        names, data = read_data_csv(args.data)
        tester = get_tester("fisherz", data, alpha=args.alpha)
        p = data.shape[1]

    start = time.perf_counter()
    result = ALGORITHMS[args.algo](tester, p)
    wall = time.perf_counter() - start

    output = result.to_dict(include_trace=args.trace)
    output["algo"] = args.algo
    output["tester"] = args.tester
    output["wall_time"] = wall
    if names is not None:
        output["variables"] = names
    if truth is not None:
        output["shd_to_truth"] = shd(result.graph, truth)

    with open(args.out, "w") as f:
        json.dump(output, f, indent=2)
    logger.info(f"Wrote result to {args.out}")

    rows = [["edges", result.graph.num_edges()],
            ["components", len(result.components)],
            ["distinct CI tests", result.ci.distinct_queries],
            ["total CI calls", result.ci.total_calls],
            ["max level", result.max_level],
            ["wall time", format_duration(wall)]]
    if truth is not None:
        rows.append(["SHD to truth", output["shd_to_truth"]])
    print(format_table(["metric", "value"], rows))
    print()
    print(format_edge_list(result.graph), end="")
    return 0


def cmd_bench(args) -> int:
    from config_manager import ConfigManager
    from matrix_runner import BenchmarkRunner

    config_mgr = ConfigManager(args.config)
    config_mgr.load()

    # Command-line flags win over the config's logging section
    log_file = args.log_file or config_mgr.get("logging.file")
    setup_logging(level=args.log_level or config_mgr.get("logging.level", "INFO"),
                  log_file=Path(log_file) if log_file else None)

    show_progress = False if args.no_progress else None
    runner = BenchmarkRunner(config_mgr, show_progress=show_progress)

    output_dir = args.output_dir or Path(config_mgr.get("output.dir", "results"))
    output_dir.mkdir(parents=True, exist_ok=True)
    checkpoint_path = args.resume
    if not checkpoint_path and config_mgr.get("advanced.checkpoint", True):
        checkpoint_path = output_dir / "checkpoint.json"

    runner.run(checkpoint_path=checkpoint_path)
    paths = runner.write_outputs(output_dir)

    summary = runner.get_results_summary()
    logger.info("=" * 60)
    logger.info("BENCHMARK RESULTS")
    logger.info("=" * 60)
    logger.info(f"Records: {summary['total_records']}  Failed: {summary['failed']}")
    for algo, entry in summary["by_algo"].items():
        logger.info(f"  {algo}: {entry['runs']} runs, {entry['exact']} exact, {entry['errors']} errors")
    for name, path in paths.items():
        logger.info(f"  => {name}: {path}")

    if runner.interrupted:
        return 130
    if args.strict and runner.has_errors():
        logger.error("Some benchmark cells failed (--strict)")
        return 1
    return 0


def cmd_verify_lb(args) -> int:
    from lowerbound import certify_lower_bound
    from utils.format import colorize, format_table

    report = certify_lower_bound(args.s)
    rows = [[t.w, t.u, t.v, t.statements_checked, t.indistinguishable,
             t.designed_disagreement, t.certified] for t in report.traces]
    print(format_table(["trace W", "u", "v", "statements", "agree off-trace",
                        "disagree on W", "certified"], rows))
    print()
    status = colorize("CERTIFIED", "green") if report.certified else colorize("FAILED", "red")
    print(f"s={report.s}: {len(report.traces)} traces, required 2^s-s-1 = {report.required}: {status}")
    return 0 if report.certified else 1


def cmd_cpdag(args) -> int:
    from cpdag import essential_graph
    from graph import format_edge_list, read_dag

    text = format_edge_list(essential_graph(read_dag(args.graph)))
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
        logger.info(f"Wrote essential graph to {args.out}")
    else:
        print(text, end="")
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "discover": cmd_discover,
    "bench": cmd_bench,
    "verify-lb": cmd_verify_lb,
    "cpdag": cmd_cpdag,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the CLI.

    Returns:
        Exit code: 0 on success, 1 on errors, 130 after an interrupt
    """
    args = build_parser().parse_args(argv)
    setup_logging(level=args.log_level or "INFO", log_file=args.log_file)
    install_signal_handlers()

    from utils.errors import ToolkitError, format_error_message

    logger.debug(f"Ancestral Search Toolkit v{VERSION}: {args.command}")
    try:
        return COMMANDS[args.command](args)

    except ToolkitError as e:
        logger.error(format_error_message(type(e).__name__, args.command, str(e)))
        return 1

    except (FileNotFoundError, PermissionError) as e:
        logger.error("File error: %s", e)
        return 1

    except KeyboardInterrupt:
        logger.warning("Interrupted")
        return 130

    except Exception as e:
        logger.error("Unexpected error: %s", e, exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
