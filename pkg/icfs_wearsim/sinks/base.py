from abc import ABC, abstractmethod
from typing import Any, Dict, List

from ..models import BufferSample, DetectorEvent, Event


class ResultSink(ABC):
    @abstractmethod
    def write_summary(self, rows: List[Dict[str, Any]], name: str = "summary.csv") -> None:
        pass

    @abstractmethod
    def write_wear(self, blocks, name: str = "wear.csv") -> None:
        """blocks is the block table frame: block_id, status, write_count, fill."""
        pass

    @abstractmethod
    def write_buffer_timeline(self, samples: List[BufferSample], name: str = "buffer.csv") -> None:
        pass

    @abstractmethod
    def write_detector_timeline(self, events: List[DetectorEvent], name: str = "detector.csv") -> None:
        pass

    @abstractmethod
    def write_events(self, events: List[Event], name: str = "events.csv") -> None:
        pass

    @abstractmethod
    def write_trace(self, text: str, path: str) -> None:
        pass
