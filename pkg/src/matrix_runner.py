"""Benchmark sweep over graph families, sizes, densities, seeds and algorithms.

Each cell generates a ground-truth DAG (and Gaussian data when the Fisher-z
tester is requested), runs every algorithm with a fresh tester, and scores
the output against the true essential graph. A failing cell is recorded with
its error and the sweep continues.
"""

import json
import logging
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from tqdm import tqdm

from citest import get_tester
from config_manager import ConfigManager
from cpdag import essential_graph, normalized_shd, shd, skeleton_metrics
from gas import GasResult, run_gas, run_gas_plus
from graph import Dag
from metrics import aggregate
from pc import run_pc
from reports.csv_formatter import CSVFormatter
from shutdown import is_shutdown_requested
from synth import barabasi_albert_dag, erdos_renyi_dag, parallel_paths_dag, random_sem, sample_sem
from utils.errors import ToolkitError
from utils.hardware import get_hardware_info

logger = logging.getLogger(__name__)

# Algorithm registry
ALGORITHMS: Dict[str, Callable[..., GasResult]] = {
    "gas": run_gas,
    "gas+": run_gas_plus,
    "pc": run_pc,
}

WEIGHT_STREAM = 1
SAMPLE_STREAM = 2


@dataclass(frozen=True)
class Cell:
    """One point of the sweep grid (graph coordinates only)."""
    family: str
    p: int
    density: Optional[float]
    density_kind: str
    seed: int

    @property
    def descriptor(self) -> str:
        if self.family == "parallel":
            return "-"
        if self.family == "ba":
            return f"m={int(self.density)}"
        prefix = "q" if self.density_kind == "prob" else "k"
        return f"{prefix}={self.density:g}"


@dataclass
class RunRecord:
    """Outcome of one algorithm on one cell with one tester.

    n and alpha are None for the oracle (infinite sample). Metric fields are
    None when the run failed and error holds the message.
    """
    algo: str
    tester: str
    family: str
    p: int
    density: str
    n: Optional[int]
    seed: int
    alpha: Optional[float] = None
    shd: Optional[int] = None
    normalized_shd: Optional[float] = None
    true_positives: Optional[int] = None
    false_positives: Optional[int] = None
    false_negatives: Optional[int] = None
    precision: Optional[float] = None
    recall: Optional[float] = None
    f1: Optional[float] = None
    distinct_ci: Optional[int] = None
    total_ci: Optional[int] = None
    max_level: Optional[int] = None
    wall_seconds: Optional[float] = None
    error: Optional[str] = None

    @property
    def key(self) -> Tuple:
        """Identity of the run for resume; covers every setting that changes its result."""
        return (self.algo, self.tester, self.family, self.p, self.density, self.n, self.alpha,
                self.seed)


RECORD_FIELDS = [f.name for f in fields(RunRecord)]


def derive_seed(seed: int, stream: int) -> int:
    """Independent, reproducible seed for one random stream of a cell."""
    return int(np.random.SeedSequence([seed, stream]).generate_state(1)[0])


def generate_graph(cell: Cell) -> Dag:
    """Ground-truth DAG for a cell."""
    if cell.family == "er":
        if cell.density_kind == "prob":
            return erdos_renyi_dag(cell.p, edge_prob=cell.density, seed=cell.seed)
        return erdos_renyi_dag(cell.p, expected_neighbors=cell.density, seed=cell.seed)
    if cell.family == "ba":
        return barabasi_albert_dag(cell.p, int(cell.density), seed=cell.seed)
    return parallel_paths_dag(cell.p)


def score(record: RunRecord, result: GasResult, truth) -> RunRecord:
    """Fill the metric fields of a record from a run result."""
    skeleton = skeleton_metrics(result.graph, truth)
    record.shd = shd(result.graph, truth)
    record.normalized_shd = normalized_shd(result.graph, truth)
    record.true_positives = skeleton.true_positives
    record.false_positives = skeleton.false_positives
    record.false_negatives = skeleton.false_negatives
    record.precision = skeleton.precision
    record.recall = skeleton.recall
    record.f1 = skeleton.f1
    record.distinct_ci = result.ci.distinct_queries
    record.total_ci = result.ci.total_calls
    record.max_level = result.max_level
    return record


class BenchmarkRunner:
    """Runs the benchmark grid described by a validated configuration."""

    def __init__(self, config_mgr: ConfigManager, show_progress: Optional[bool] = None):
        """Initialize the runner.

        Args:
            config_mgr: Loaded configuration manager
            show_progress: Override for advanced.show_progress
        """
        self.config_mgr = config_mgr
        self.experiment = config_mgr.experiment()
        if show_progress is None:
            show_progress = bool(config_mgr.get("advanced.show_progress", True))
        self.show_progress = show_progress

        self.records: List[RunRecord] = []
        self.checkpoint_file: Optional[Path] = None
        self.interrupted = False

    def build_cells(self) -> List[Cell]:
        """Grid cells in deterministic order: size, density, seed."""
        exp = self.experiment
        densities = exp["densities"] if exp["family"] != "parallel" else [None]
        return [
            Cell(family=exp["family"], p=p, density=d, density_kind=exp["density_kind"], seed=s)
            for p in exp["sizes"]
            for d in densities
            for s in exp["seeds"]
        ]

    def run(self, checkpoint_path: Optional[Union[str, Path]] = None) -> List[RunRecord]:
        """Run every cell, resuming from a checkpoint if one is given.

        Args:
            checkpoint_path: JSON checkpoint file to load from and save to

        Returns:
            All records, including ones restored from the checkpoint
        """
        if checkpoint_path:
            self.checkpoint_file = Path(checkpoint_path)
            self._load_checkpoint()

        cells = self.build_cells()
        if self.records:
            self._drop_stale_records(cells)
        done = {r.key for r in self.records}
        logger.info(f"Running {len(cells)} cells x {len(self.experiment['testers'])} testers "
                    f"x {len(self.experiment['algos'])} algorithms")

        for cell in tqdm(cells, desc="Benchmark", unit="cell", disable=not self.show_progress):
            if is_shutdown_requested():
                logger.info("Shutdown requested - saving progress and stopping")
                self.interrupted = True
                break

            self.records.extend(self._run_cell(cell, done))
            if self.checkpoint_file:
                self._save_checkpoint()

        failed = sum(1 for r in self.records if r.error)
        logger.info(f"Benchmark complete: {len(self.records)} records, {failed} failed")
        return self.records

    def _run_cell(self, cell: Cell, done) -> List[RunRecord]:
        exp = self.experiment
        records = []

        try:
            dag = generate_graph(cell)
            truth = essential_graph(dag)
        except ToolkitError as e:
            logger.warning(f"Cell {cell} could not be generated: {e}")
            failed = [self._record(cell, algo, tester, error=str(e))
                      for tester in exp["testers"] for algo in exp["algos"]]
            return [r for r in failed if r.key not in done]

        data = None
        for tester_name in exp["testers"]:
            for algo in exp["algos"]:
                record = self._record(cell, algo, tester_name)
                if record.key in done:
                    continue

                try:
                    if tester_name == "fisherz":
                        if data is None:
                            model = random_sem(dag, seed=derive_seed(cell.seed, WEIGHT_STREAM))
                            data = sample_sem(model, exp["n"], seed=derive_seed(cell.seed, SAMPLE_STREAM))
                        tester = get_tester("fisherz", data, alpha=exp["alpha"])
                    else:
                        tester = get_tester("oracle", dag)

                    start = time.perf_counter()
                    result = ALGORITHMS[algo](tester, cell.p)
                    record.wall_seconds = time.perf_counter() - start
                    score(record, result, truth)

                except (ToolkitError, np.linalg.LinAlgError) as e:
                    logger.warning(f"{algo}/{tester_name} failed on {cell}: {e}")
                    record.error = str(e)

                records.append(record)

        return records

    def _record(self, cell: Cell, algo: str, tester: str, error: Optional[str] = None) -> RunRecord:
        return RunRecord(
            algo=algo,
            tester=tester,
            family=cell.family,
            p=cell.p,
            density=cell.descriptor,
            n=self.experiment["n"] if tester == "fisherz" else None,
            seed=cell.seed,
            alpha=self.experiment["alpha"] if tester == "fisherz" else None,
            error=error,
        )

    def _drop_stale_records(self, cells: List[Cell]):
        """Forget restored records that the current grid would not produce."""
        exp = self.experiment
        expected = {self._record(cell, algo, tester).key
                    for cell in cells for tester in exp["testers"] for algo in exp["algos"]}
        kept = [r for r in self.records if r.key in expected]
        stale = len(self.records) - len(kept)
        if stale:
            logger.warning(f"Ignoring {stale} checkpoint records from a different experiment")
        self.records = kept

    def _save_checkpoint(self):
        """Save completed records to the checkpoint file."""
        if not self.checkpoint_file:
            return

        try:
            with open(self.checkpoint_file, 'w') as f:
                json.dump({"experiment": self.experiment,
                           "records": [asdict(r) for r in self.records]}, f, indent=2)
            logger.debug(f"Checkpoint saved to {self.checkpoint_file}")
        except OSError as e:
            logger.warning(f"Failed to save checkpoint: {e}")

    def _load_checkpoint(self):
        """Restore completed records from the checkpoint file."""
        if not self.checkpoint_file or not self.checkpoint_file.exists():
            return

        try:
            with open(self.checkpoint_file, 'r') as f:
                data = json.load(f)
            self.records = [RunRecord(**r) for r in data.get("records", [])]
            logger.info(f"Loaded checkpoint: {len(self.records)} records already completed")
        except (OSError, ValueError, TypeError) as e:
            logger.warning(f"Failed to load checkpoint: {e}")

    def has_errors(self) -> bool:
        return any(r.error for r in self.records)

    def write_outputs(self, output_dir: Union[str, Path]) -> Dict[str, Path]:
        """Write results.csv, aggregate.csv and summary.json.

        Returns:
            Mapping of output name to path
        """
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)
        paths = {
            "results": output_dir / "results.csv",
            "aggregate": output_dir / "aggregate.csv",
            "summary": output_dir / "summary.json",
        }

        CSVFormatter.write_records(self.records, paths["results"])
        table = aggregate(self.records) if self.records else []
        CSVFormatter.write_aggregate(table, paths["aggregate"])

        summary = self.get_results_summary()
        summary["host"] = get_hardware_info()
        with open(paths["summary"], 'w') as f:
            json.dump(summary, f, indent=2)

        logger.info(f"Wrote benchmark outputs to {output_dir}")
        return paths

    def get_results_summary(self) -> Dict[str, Any]:
        """Counts of records, failures and exact recoveries per algorithm."""
        by_algo: Dict[str, Dict[str, int]] = {}
        for r in self.records:
            entry = by_algo.setdefault(r.algo, {"runs": 0, "errors": 0, "exact": 0})
            entry["runs"] += 1
            if r.error:
                entry["errors"] += 1
            elif r.shd == 0:
                entry["exact"] += 1

        return {
            "experiment": self.experiment,
            "total_records": len(self.records),
            "failed": sum(1 for r in self.records if r.error),
            "interrupted": self.interrupted,
            "by_algo": by_algo,
        }


def run_experiment(config: Union[ConfigManager, Dict[str, Any]],
                   output_dir: Optional[Union[str, Path]] = None,
                   checkpoint_path: Optional[Union[str, Path]] = None,
                   show_progress: bool = False) -> List[RunRecord]:
    """Run a benchmark sweep and optionally write its CSV outputs.

    Args:
        config: Loaded ConfigManager, or a dict overriding the experiment section
        output_dir: Where to write results (None = do not write)
        checkpoint_path: Checkpoint file for resume
        show_progress: Show a progress bar

    Returns:
        List of RunRecord

    Raises:
        ConfigurationError: If the configuration is invalid
    """
    if isinstance(config, dict):
        manager = ConfigManager()
        manager.load()
        manager.config = manager._deep_merge(manager.config, {"experiment": config})
        manager.validate()
    else:
        manager = config

    runner = BenchmarkRunner(manager, show_progress=show_progress)
    records = runner.run(checkpoint_path)
    if output_dir is not None:
        runner.write_outputs(output_dir)
    return records
