"""
Plot-ready CSV data from a run or sweep output directory.

Outputs (all plain CSV, one header row):

    write_distribution.csv    policy,pfr,cf,replicate,block_id,write_count
    policy_comparison.csv     policy,pfr,cf,runs,completed,mu,sigma,frag
    buffer_sizes.csv          policy,pfr,cf,replicate,checkpoint_index,r_len_bytes,capacity_bytes,records_at_commit
    interval_distribution.csv policy,pfr,cf,appends,count,empirical_tail,analytic_tail
    expected_intervals.csv    pfr,cf,expected_appends,std_appends,expected_amplification
"""
import glob
import logging
import math
import os
import re
from typing import Dict, List

import pandas as pd

from .exceptions import ResultsError
from .failure import expected_appends_per_interval, interval_variance
from .metrics import format_fixed
from .observations import interval_distribution
from .sinks.csv_files import BUFFER_COLUMNS, write_frame

logger = logging.getLogger(__name__)

RUN_FILE = re.compile(r"^(?P<policy>[a-z]+)_pfr(?P<pfr>[0-9.e+-]+)_cf(?P<cf>\d+)_r(?P<replicate>\d+)\.csv$")
KEY_COLUMNS = ["policy", "pfr", "cf"]


class ReportBuilder:
    def __init__(self, results_dir: str, out_dir: str):
        self.results_dir = results_dir
        self.out_dir = out_dir

    def _path(self, *parts) -> str:
        return os.path.join(self.results_dir, *parts)

    def _run_files(self, kind: str) -> Dict[str, str]:
        return {os.path.basename(p): p for p in sorted(glob.glob(self._path(kind, "*.csv")))}

    def _single_run_key(self, summary: pd.DataFrame) -> Dict:
        row = summary.iloc[0]
        return {"policy": row["policy"], "pfr": float(row["pfr"]), "cf": int(row["cf"]), "replicate": 0}

    def _collect(self, kind: str, single_name: str, summary: pd.DataFrame) -> List[pd.DataFrame]:
        """Per-run frames tagged with policy, pfr, cf and replicate."""
        frames = []
        files = self._run_files(kind)
        if files:
            for name, path in files.items():
                match = RUN_FILE.match(name)
                if not match:
                    logger.debug(f"Ignoring {path}: not a run file")
                    continue
                frame = pd.read_csv(path)
                frame.insert(0, "policy", match.group("policy"))
                frame.insert(1, "pfr", float(match.group("pfr")))
                frame.insert(2, "cf", int(match.group("cf")))
                frame.insert(3, "replicate", int(match.group("replicate")))
                frames.append(frame)
        elif os.path.exists(self._path(single_name)):
            frame = pd.read_csv(self._path(single_name))
            for position, (column, value) in enumerate(self._single_run_key(summary).items()):
                frame.insert(position, column, value)
            frames.append(frame)
        return frames

    def check_inputs(self) -> None:
        missing = []
        if not os.path.isfile(self._path("summary.csv")):
            missing.append("summary.csv")
        if not self._run_files("wear") and not os.path.isfile(self._path("wear.csv")):
            missing.append("wear.csv (or wear/*.csv)")
        if missing:
            raise ResultsError(f"Missing report inputs in {self.results_dir}: {', '.join(missing)}", missing=missing)

    def build(self) -> Dict[str, str]:
        self.check_inputs()
        summary = pd.read_csv(self._path("summary.csv"), keep_default_na=False)
        if summary.empty:
            raise ResultsError(f"{self._path('summary.csv')} holds no runs", missing=["summary.csv"])
        written = {}

        wear = self._collect("wear", "wear.csv", summary)
        distribution = pd.concat(wear, ignore_index=True)[KEY_COLUMNS + ["replicate", "block_id", "write_count"]]
        written["write_distribution"] = self._write(distribution, "write_distribution.csv")

        written["policy_comparison"] = self._write(policy_comparison(summary), "policy_comparison.csv")

        buffers = self._collect("buffer", "buffer.csv", summary)
        columns = KEY_COLUMNS + ["replicate"] + BUFFER_COLUMNS
        buffer_frame = pd.concat(buffers, ignore_index=True)[columns] if buffers else pd.DataFrame(columns=columns)
        written["buffer_sizes"] = self._write(buffer_frame, "buffer_sizes.csv")

        intervals_path = self._path("intervals.csv")
        if os.path.isfile(intervals_path):
            intervals = pd.read_csv(intervals_path)
            written["interval_distribution"] = self._write(pooled_distribution(intervals),
                                                           "interval_distribution.csv")

        written["expected_intervals"] = self._write(expected_intervals(summary), "expected_intervals.csv")
        logger.info(f"Report written to {self.out_dir} ({len(written)} files)")
        return written

    def _write(self, frame: pd.DataFrame, name: str) -> str:
        path = os.path.join(self.out_dir, name)
        write_frame(frame, path)
        return path


def policy_comparison(summary: pd.DataFrame) -> pd.DataFrame:
    """Mean mu, sigma and frag over the completed runs of every (policy, pfr, cf)."""
    rows = []
    for (policy, pfr, cf), group in summary.groupby(KEY_COLUMNS, sort=False):
        done = group[group["status"] == "Completed"]
        row = {"policy": policy, "pfr": pfr, "cf": cf, "runs": len(group), "completed": len(done)}
        for column in ("mu", "sigma", "frag"):
            row[column] = format_fixed(float(done[column].astype(float).mean())) if len(done) else ""
        rows.append(row)
    return pd.DataFrame(rows, columns=KEY_COLUMNS + ["runs", "completed", "mu", "sigma", "frag"])


def pooled_distribution(intervals: pd.DataFrame) -> pd.DataFrame:
    frames = []
    for (policy, pfr, cf), group in intervals.groupby(KEY_COLUMNS, sort=False):
        if pfr >= 1.0:
            continue
        frame = interval_distribution(group["appends"], float(pfr), int(cf))
        frame.insert(0, "policy", policy)
        frame.insert(1, "pfr", pfr)
        frame.insert(2, "cf", cf)
        frames.append(frame)
    columns = KEY_COLUMNS + ["appends", "count", "empirical_tail", "analytic_tail"]
    return pd.concat(frames, ignore_index=True)[columns] if frames else pd.DataFrame(columns=columns)


def expected_intervals(summary: pd.DataFrame) -> pd.DataFrame:
    """Closed-form appends per interval for every (pfr, cf) present in the results."""
    rows = []
    cells = summary[["pfr", "cf"]].drop_duplicates()
    for pfr, cf in zip(cells["pfr"].astype(float), cells["cf"].astype(int)):
        if pfr >= 1.0:
            continue
        mean = expected_appends_per_interval(pfr, cf)
        rows.append({
            "pfr": pfr,
            "cf": cf,
            "expected_appends": format_fixed(mean),
            "std_appends": format_fixed(math.sqrt(interval_variance(pfr, cf))),
            "expected_amplification": format_fixed(mean / cf),
        })
    return pd.DataFrame(rows, columns=["pfr", "cf", "expected_appends", "std_appends", "expected_amplification"])
