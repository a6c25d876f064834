import logging
import os
from dataclasses import asdict
from typing import Any, Dict, List

import pandas as pd

from ..metrics import FLOAT_COLUMNS, SUMMARY_COLUMNS, format_fixed
from ..models import BufferSample, DetectorEvent, Event
from .base import ResultSink

logger = logging.getLogger(__name__)

BUFFER_COLUMNS = ["checkpoint_index", "r_len_bytes", "capacity_bytes", "records_at_commit"]
DETECTOR_COLUMNS = ["op_index", "event", "fail_count", "success_count", "buffer_status"]
EVENT_COLUMNS = ["op_index", "kind", "block", "detail"]


def write_frame(frame: pd.DataFrame, path: str) -> None:
    """Plain CSV with Unix line endings; the same frame always gives the same bytes."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    logger.debug(f"Wrote {len(frame)} rows to {path}")


def fixed_floats(frame: pd.DataFrame, columns=FLOAT_COLUMNS) -> pd.DataFrame:
    frame = frame.copy()
    for column in columns:
        if column in frame:
            frame[column] = [format_fixed(v) if isinstance(v, float) else v for v in frame[column]]
    return frame


def records_frame(records, columns: List[str]) -> pd.DataFrame:
    return pd.DataFrame([asdict(r) for r in records], columns=columns)


class CsvSink(ResultSink):
    def __init__(self, out_dir: str):
        self.out_dir = out_dir

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def write_summary(self, rows: List[Dict[str, Any]], name: str = "summary.csv") -> None:
        write_frame(fixed_floats(pd.DataFrame(rows, columns=SUMMARY_COLUMNS)), self.path(name))

    def write_wear(self, blocks: pd.DataFrame, name: str = "wear.csv") -> None:
        write_frame(blocks, self.path(name))

    def write_buffer_timeline(self, samples: List[BufferSample], name: str = "buffer.csv") -> None:
        write_frame(records_frame(samples, BUFFER_COLUMNS), self.path(name))

    def write_detector_timeline(self, events: List[DetectorEvent], name: str = "detector.csv") -> None:
        write_frame(records_frame(events, DETECTOR_COLUMNS), self.path(name))

    def write_events(self, events: List[Event], name: str = "events.csv") -> None:
        write_frame(records_frame(events, EVENT_COLUMNS), self.path(name))

    def write_trace(self, text: str, path: str) -> None:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", newline="\n") as f:
            f.write(text)
        logger.debug(f"Wrote failure trace to {path}")
