import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from .api import INTERVAL_COLUMNS, build_config, interval_rows
from .engine import run
from .metrics import FLOAT_COLUMNS, SUMMARY_COLUMNS, format_fixed, summary_row
from .models import RunStatus, SweepSpec
from .policies import PolicyKind
from .sinks import CsvSink
from .sinks.csv_files import BUFFER_COLUMNS, records_frame, write_frame

logger = logging.getLogger(__name__)

AGGREGATE_COLUMNS = [
    "policy", "pfr", "cf", "status", "mu", "sigma", "frag",
    "completed", "exhausted", "timeout", "error", "replicates",
]
# Aggregate markers for cells that could not finish.
NOT_AVAILABLE = "N/A"
HARD = "HD"


def cell_seed(base_seed: int, pfr_index: int, cf_index: int, replicate: int) -> int:
    """
    Seed of one sweep cell.

    Policies share the seed so that every policy in a (pfr, cf, replicate) cell sees the
    same failure trace; adding pfr or cf values never changes the seeds of existing cells.
    """
    state = np.random.SeedSequence([base_seed, pfr_index, cf_index, replicate]).generate_state(1, np.uint64)
    return int(state[0])


def run_file_name(policy: str, pfr: float, cf: int, replicate: int) -> str:
    return f"{policy}_pfr{pfr:g}_cf{cf}_r{replicate}.csv"


@dataclass(frozen=True)
class Cell:
    index: int
    policy: str
    pfr: float
    cf: int
    replicate: int
    seed: int
    base: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    @property
    def label(self) -> str:
        return f"policy={self.policy} pfr={self.pfr:g} cf={self.cf} seed={self.seed}"


@dataclass
class CellOutcome:
    cell: Cell
    row: Dict[str, Any]
    wear: Optional[pd.DataFrame] = None
    buffer: Optional[pd.DataFrame] = None
    intervals: List[Dict[str, Any]] = field(default_factory=list)
    duration: float = 0.0
    error: Optional[str] = None


def expand_cells(spec: SweepSpec) -> List[Cell]:
    """All cells in canonical order: pfr, cf, policy, replicate."""
    cells = []
    for i, pfr in enumerate(spec.pfr_list):
        for j, cf in enumerate(spec.cf_list):
            for policy in spec.policies:
                for rep in range(spec.replicates):
                    cells.append(Cell(len(cells), policy.value, pfr, cf, rep,
                                      cell_seed(spec.base_seed, i, j, rep), spec.base))
    return cells


def run_cell(cell: Cell) -> CellOutcome:
    start = time.time()
    try:
        config = build_config(cell.base, {"pfr": cell.pfr, "cf": cell.cf, "policy": cell.policy,
                                          "seed": cell.seed}, required=(), extra_keys=())
        result = run(config)
    except Exception as e:
        row = {column: "" for column in SUMMARY_COLUMNS}
        row.update(policy=cell.policy, pfr=cell.pfr, cf=cell.cf, status=RunStatus.ERROR.value, seed=cell.seed)
        return CellOutcome(cell, row, duration=time.time() - start, error=str(e))
    buffer = records_frame(result.buffer_timeline, BUFFER_COLUMNS) if result.config.policy is PolicyKind.BF else None
    return CellOutcome(
        cell,
        summary_row(result),
        wear=result.blocks,
        buffer=buffer,
        intervals=interval_rows(result, cell.replicate),
        duration=time.time() - start,
    )


def aggregate(rows: pd.DataFrame) -> pd.DataFrame:
    """
    Collapse replicates into one row per (policy, pfr, cf).

    The cell status is the worst replicate status, not a majority vote, ranked
    ERROR > N/A (Exhausted) > HD (Timeout) > Completed. A single exhausted replicate out of
    thirty therefore marks the cell N/A. Only a cell whose replicates all completed reports
    the mean of mu, sigma and frag; the per-status counts columns show how many replicates
    hit each outcome.
    """
    out = []
    for (policy, pfr, cf), group in rows.groupby(["policy", "pfr", "cf"], sort=False):
        counts = group["status"].value_counts()
        tally = {
            "completed": int(counts.get(RunStatus.COMPLETED.value, 0)),
            "exhausted": int(counts.get(RunStatus.EXHAUSTED.value, 0)),
            "timeout": int(counts.get(RunStatus.TIMEOUT.value, 0)),
            "error": int(counts.get(RunStatus.ERROR.value, 0)),
        }
        row = {"policy": policy, "pfr": pfr, "cf": cf, **tally, "replicates": len(group)}
        if tally["error"]:
            marker = "ERROR"
        elif tally["exhausted"]:
            marker = NOT_AVAILABLE
        elif tally["timeout"]:
            marker = HARD
        else:
            marker = None
        if marker is None:
            row["status"] = RunStatus.COMPLETED.value
            for column in ("mu", "sigma", "frag"):
                row[column] = format_fixed(float(group[column].astype(float).mean()))
        else:
            row.update(status=marker, mu=marker, sigma=marker, frag=marker)
        out.append(row)
    return pd.DataFrame(out, columns=AGGREGATE_COLUMNS)


class SweepRunner:
    """
    Runs every (pfr, cf, policy, replicate) cell of a sweep and writes the results.

    Cells may execute in any order or in parallel; outputs are always written in canonical
    cell order once every cell has finished.
    """

    def __init__(self, spec: SweepSpec, order_seed: Optional[int] = None, silent: bool = False):
        self.spec = spec
        self.order_seed = order_seed
        self.silent = silent

    def execution_order(self, cells: List[Cell]) -> List[Cell]:
        if self.order_seed is None:
            return cells
        permutation = np.random.default_rng(self.order_seed).permutation(len(cells))
        return [cells[i] for i in permutation]

    def run(self) -> pd.DataFrame:
        cells = expand_cells(self.spec)
        total = len(cells)
        if not self.silent:
            logger.info(f"ICFS WEARSIM | Sweep of {total} runs into {self.spec.output_dir}")
            logger.info(
                f"Found {len(self.spec.pfr_list)} pfr x {len(self.spec.cf_list)} cf x "
                f"{len(self.spec.policies)} policies x {self.spec.replicates} replicates"
            )

        outcomes: Dict[int, CellOutcome] = {}
        ordered = self.execution_order(cells)
        if self.spec.jobs > 1:
            with ProcessPoolExecutor(max_workers=self.spec.jobs) as pool:
                futures = [pool.submit(run_cell, cell) for cell in ordered]
                for idx, future in enumerate(as_completed(futures), start=1):
                    outcome = future.result()
                    outcomes[outcome.cell.index] = outcome
                    self._log_end(idx, total, outcome)
        else:
            for idx, cell in enumerate(ordered, start=1):
                self._log_start(idx, total, cell)
                outcome = run_cell(cell)
                outcomes[cell.index] = outcome
                self._log_end(idx, total, outcome)

        results = [outcomes[cell.index] for cell in cells]
        summary = self.write(results)
        statuses = summary["status"].value_counts()
        logger.info(
            f"Done. COMPLETED={statuses.get(RunStatus.COMPLETED.value, 0)} "
            f"NA={statuses.get(RunStatus.EXHAUSTED.value, 0)} HD={statuses.get(RunStatus.TIMEOUT.value, 0)} "
            f"ERROR={statuses.get(RunStatus.ERROR.value, 0)} TOTAL={total}"
        )
        return summary

    def _log_start(self, idx, total, cell: Cell):
        # Timestamp handled by logging formatter
        logger.info(f"{idx} of {total} START cell {cell.label} r{cell.replicate} ... [RUN]")

    def _log_end(self, idx, total, outcome: CellOutcome):
        cell = outcome.cell
        if outcome.error is not None:
            logger.error(f"{idx} of {total} ERROR cell {cell.label} r{cell.replicate}: {outcome.error}")
            return
        logger.info(
            f"{idx} of {total} OK cell {cell.label} r{cell.replicate} status={outcome.row['status']} "
            f"... [OK in {outcome.duration:.2f}s]"
        )

    def write(self, results: List[CellOutcome]) -> pd.DataFrame:
        out = self.spec.output_dir
        sink = CsvSink(out)
        rows = [r.row for r in results]
        sink.write_summary(rows)
        summary = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)

        numeric = summary.copy()
        for column in FLOAT_COLUMNS:
            numeric[column] = pd.to_numeric(numeric[column], errors="coerce")
        write_frame(aggregate(numeric), os.path.join(out, "aggregate.csv"))

        intervals = [row for r in results for row in r.intervals]
        write_frame(pd.DataFrame(intervals, columns=INTERVAL_COLUMNS),
                    os.path.join(out, "intervals.csv"))
        for r in results:
            name = run_file_name(r.cell.policy, r.cell.pfr, r.cell.cf, r.cell.replicate)
            if r.wear is not None:
                sink.write_wear(r.wear, os.path.join("wear", name))
            if r.buffer is not None:
                write_frame(r.buffer, os.path.join(out, "buffer", name))
        return summary
