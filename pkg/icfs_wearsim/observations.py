"""
Preset experiments behind the two motivating observations: rollback re-writes pile wear
onto a few blocks, and a single checkpoint interval can write many times the data it commits.
"""
import logging
from dataclasses import dataclass, replace
from typing import Iterable, List

import numpy as np
import pandas as pd

from .engine import run
from .failure import expected_appends_per_interval, interval_tail_probabilities
from .models import SimConfig, SimResult
from .policies import PolicyKind

logger = logging.getLogger(__name__)

OBSERVATION_ONE = dict(pfr=0.6, cf=10, policy=PolicyKind.BL, workload_bytes=2048, op_budget=2_000_000)
OBSERVATION_TWO = dict(pfr=0.2, cf=10, workload_bytes=4096)


@dataclass
class IntervalReport:
    pfr: float
    cf: int
    ideal_bytes_per_interval: int
    expected_appends: float
    per_run: pd.DataFrame
    pooled: np.ndarray

    @property
    def pooled_mean(self) -> float:
        return float(self.pooled.mean()) if self.pooled.size else 0.0

    def distribution(self) -> pd.DataFrame:
        return interval_distribution(self.pooled, self.pfr, self.cf)


def interval_distribution(lengths: Iterable[int], pfr: float, cf: int) -> pd.DataFrame:
    """Empirical and analytic P(interval >= appends) for every observed interval length."""
    lengths = np.asarray(list(lengths), dtype=np.int64)
    if lengths.size == 0:
        return pd.DataFrame(columns=["appends", "count", "empirical_tail", "analytic_tail"])
    values, counts = np.unique(lengths, return_counts=True)
    at_least = counts[::-1].cumsum()[::-1]
    return pd.DataFrame(
        {
            "appends": values,
            "count": counts,
            "empirical_tail": at_least / lengths.size,
            "analytic_tail": interval_tail_probabilities(pfr, cf, values.tolist()),
        }
    )


def run_observation_two(config: SimConfig, seeds: Iterable[int]) -> IntervalReport:
    """Run config once per seed and pool the per-interval append counts."""
    rows = []
    pooled: List[int] = []
    for seed in seeds:
        result = run(replace(config, seed=int(seed)))
        counts = result.interval_append_counts
        pooled.extend(counts)
        rows.append(
            {
                "seed": int(seed),
                "status": result.status.value,
                "intervals": len(counts),
                "mean_interval_appends": float(np.mean(counts)) if counts else 0.0,
                "max_interval_appends": result.max_interval_appends,
                "amplification": result.amplification,
            }
        )
    report = IntervalReport(
        pfr=config.pfr,
        cf=config.cf,
        ideal_bytes_per_interval=config.cf * config.append_unit,
        expected_appends=expected_appends_per_interval(config.pfr, config.cf),
        per_run=pd.DataFrame(rows),
        pooled=np.asarray(pooled, dtype=np.int64),
    )
    logger.debug(
        f"Pooled {report.pooled.size} intervals over {len(rows)} runs: mean {report.pooled_mean:.2f} "
        f"(expected {report.expected_appends:.2f})"
    )
    return report


@dataclass
class HotBlockReport:
    """Per-block wear of one run, hottest block first."""
    result: SimResult
    distribution: pd.DataFrame

    @property
    def hottest_block(self) -> int:
        return int(self.distribution["block_id"].iloc[0]) if len(self.distribution) else -1

    @property
    def max_write_count(self) -> int:
        return int(self.distribution["write_count"].iloc[0]) if len(self.distribution) else 0

    @property
    def hot_share(self) -> float:
        """Fraction of all wear that landed on the hottest block."""
        return float(self.distribution["share"].iloc[0]) if len(self.distribution) else 0.0

    @property
    def touched_blocks(self) -> int:
        return len(self.distribution)


def write_distribution(blocks: pd.DataFrame) -> pd.DataFrame:
    touched = blocks[blocks["write_count"] > 0][["block_id", "status", "write_count"]]
    touched = touched.sort_values(["write_count", "block_id"], ascending=[False, True], kind="stable")
    total = int(touched["write_count"].sum())
    touched = touched.assign(share=touched["write_count"] / total if total else 0.0)
    return touched.reset_index(drop=True)


def run_observation_one(config: SimConfig) -> HotBlockReport:
    """Per-block write distribution of a BL append workload at a very high failure rate."""
    result = run(config)
    report = HotBlockReport(result=result, distribution=write_distribution(result.blocks))
    logger.debug(
        f"Hottest block {report.hottest_block}: {report.max_write_count} writes, "
        f"{report.hot_share:.1%} of all wear over {report.touched_blocks} blocks"
    )
    return report


def observation_one_config(**overrides) -> SimConfig:
    return SimConfig(**{**OBSERVATION_ONE, **overrides})


def observation_two_config(**overrides) -> SimConfig:
    return SimConfig(**{**OBSERVATION_TWO, **overrides})
