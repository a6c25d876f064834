from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy as np

from .exceptions import DomainError

SUMMARY_COLUMNS = [
    "policy", "pfr", "cf", "status", "mu", "sigma", "frag", "max_write_count",
    "total_appends", "max_interval_appends", "amplification", "seed",
]
FLOAT_COLUMNS = ("mu", "sigma", "frag", "amplification")


def _as_counts(counts: Sequence[int]) -> np.ndarray:
    values = np.asarray(counts, dtype=np.float64)
    if values.size == 0:
        raise DomainError("write counts must not be empty")
    return values


def mean_writes(counts: Sequence[int]) -> float:
    return float(np.mean(_as_counts(counts)))


def std_writes(counts: Sequence[int]) -> float:
    """Population standard deviation (divisor n)."""
    values = _as_counts(counts)
    if np.all(values == values[0]):
        return 0.0
    return float(np.std(values, ddof=0))


def fragmentation(used: int, total: int) -> float:
    if total <= 0:
        raise DomainError(f"total block count must be positive, got {total}")
    if not 0 <= used <= total:
        raise DomainError(f"used block count {used} outside [0, {total}]")
    return 1.0 - used / total


def amplification(total_written_units: int, ideal_units: int) -> float:
    if ideal_units <= 0:
        raise DomainError(f"ideal write volume must be positive, got {ideal_units}")
    return total_written_units / ideal_units


@dataclass(frozen=True)
class WearSummary:
    mu: float
    sigma: float
    frag: float
    n: int
    used: int
    total: int
    max_write_count: int


def summarize(wear: Sequence[int], used: int, mu_denominator: str = "all") -> WearSummary:
    """
    Wear statistics of one experiment.

    With mu_denominator="touched" the mean and deviation only cover blocks that were
    written at least once; "all" covers every block of the data region.
    """
    values = np.asarray(wear, dtype=np.int64)
    total = int(values.size)
    if mu_denominator == "touched" and np.any(values > 0):
        values = values[values > 0]
    elif mu_denominator not in ("all", "touched"):
        raise DomainError(f"unknown mu denominator {mu_denominator!r}")
    return WearSummary(
        mu=mean_writes(values),
        sigma=std_writes(values),
        frag=fragmentation(used, total),
        n=int(values.size),
        used=used,
        total=total,
        max_write_count=int(values.max()),
    )


def summary_row(result) -> Dict[str, Any]:
    config = result.config
    return {
        "policy": config.policy.value,
        "pfr": config.pfr,
        "cf": config.cf,
        "status": result.status.value,
        "mu": result.mu,
        "sigma": result.sigma,
        "frag": result.frag,
        "max_write_count": result.max_write_count,
        "total_appends": result.total_appends,
        "max_interval_appends": result.max_interval_appends,
        "amplification": result.amplification,
        "seed": config.seed,
    }


def format_fixed(value: float) -> str:
    return f"{value:.2f}"
