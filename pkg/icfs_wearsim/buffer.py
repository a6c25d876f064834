import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

from .exceptions import InvariantError
from .nvm import WRITE_UNIT, BlockStatus, BlockTable

logger = logging.getLogger(__name__)

# Each buffered record also stores its target block address.
RECORD_OVERHEAD = 8
SENTINEL = -1


class Redirect(str, Enum):
    BUFFERED = "Buffered"
    WRITE_THROUGH = "WriteThrough"


@dataclass(frozen=True)
class BufferRecord:
    target_block: int
    offset: int
    data: bytes
    overhead_bytes: int = RECORD_OVERHEAD

    @property
    def payload_len(self) -> int:
        return len(self.data)

    @property
    def size(self) -> int:
        return self.payload_len + self.overhead_bytes


class VolatileBuffer:
    """SRAM staging area; contents are lost on every power failure."""

    def __init__(self, block_size: int, sram_budget: int = 8192, capacity_bytes: Optional[int] = None):
        self.block_size = block_size
        self.sram_budget = sram_budget
        self.capacity_bytes = sram_budget if capacity_bytes is None else min(capacity_bytes, sram_budget)
        self.records: List[BufferRecord] = []
        self.occupied_bytes = 0

    def __len__(self):
        return len(self.records)

    def redirect_append(self, target: int, offset: int, data: bytes) -> Redirect:
        record = BufferRecord(target, offset, data)
        if offset < 0 or offset + record.payload_len > self.block_size:
            raise InvariantError(f"buffered record [{offset}, {offset + record.payload_len}) overruns block {target}")
        if self.occupied_bytes + record.size > self.capacity_bytes:
            return Redirect.WRITE_THROUGH
        self.records.append(record)
        self.occupied_bytes += record.size
        return Redirect.BUFFERED

    def writeback_on_checkpoint(self, table: BlockTable) -> List[Tuple[BufferRecord, int]]:
        """Write every record to its block in order and empty the buffer; all targets are checked first."""
        for record in self.records:
            status = table[record.target_block].status
            if status is not BlockStatus.ALLOCATED:
                raise InvariantError(f"buffered record targets block {record.target_block} in state {status.value}")
        flushed = [
            (record, table.record_write(record.target_block, record.payload_len,
                                        offset=record.offset, data=record.data))
            for record in self.records
        ]
        self.records = []
        self.occupied_bytes = 0
        return flushed

    def on_power_failure(self) -> int:
        dropped = len(self.records)
        self.records = []
        self.occupied_bytes = 0
        return dropped


def capacity_for(r_len: int, sram_budget: int, append_unit: int = WRITE_UNIT) -> int:
    record = append_unit + RECORD_OVERHEAD
    records = max(1, -(-r_len // append_unit))
    return min(records * record, sram_budget)


@dataclass
class SizeEstimator:
    """
    Tracks how much the committed file grows between checkpoints and sizes the buffer to it.

    The first observation after start or after a log write-back only primes prev_len.
    """
    prev_len: int = SENTINEL
    r_len: int = SENTINEL

    def update(self, committed_len: int, writeback_happened: bool, capacity: int,
               sram_budget: int, append_unit: int = WRITE_UNIT) -> Tuple[int, int]:
        """Returns (r_len, new capacity in bytes)."""
        if writeback_happened:
            self.prev_len = SENTINEL
            self.r_len = SENTINEL
            return self.r_len, capacity
        if self.prev_len == SENTINEL:
            self.prev_len = committed_len
            return self.r_len, capacity
        if committed_len < self.prev_len:
            raise InvariantError(f"committed length fell from {self.prev_len} to {committed_len} without write-back")
        self.r_len = committed_len - self.prev_len
        self.prev_len = committed_len
        return self.r_len, capacity_for(self.r_len, sram_budget, append_unit)


def update_size_estimate(estimator: SizeEstimator, buffer: VolatileBuffer, committed_len: int,
                         writeback_happened: bool, append_unit: int = WRITE_UNIT) -> int:
    r_len, capacity = estimator.update(committed_len, writeback_happened, buffer.capacity_bytes,
                                       buffer.sram_budget, append_unit)
    if capacity != buffer.capacity_bytes:
        logger.debug(f"Buffer resized {buffer.capacity_bytes} -> {capacity} bytes (r_len={r_len})")
    buffer.capacity_bytes = capacity
    return capacity
