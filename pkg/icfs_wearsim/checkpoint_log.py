from dataclasses import dataclass
from typing import Optional

from .exceptions import InvariantError


@dataclass
class LogSpace:
    """
    Log-space bookkeeping of the file system: one record per append, a commit record at
    every checkpoint and a cursor that falls back to the last commit after a power failure.

    Only positions and file lengths are modelled; record payloads are not.
    """
    capacity_records: int = 256
    writeback_threshold: Optional[int] = None
    cursor_pos: int = 0
    commit_pos: int = 0
    committed_file_len: int = 0
    uncommitted_file_len: int = 0
    writeback_events: int = 0

    def __post_init__(self):
        if self.writeback_threshold is None:
            self.writeback_threshold = self.capacity_records
        if self.uncommitted_file_len < self.committed_file_len:
            self.uncommitted_file_len = self.committed_file_len

    @property
    def occupancy(self) -> int:
        return self.cursor_pos

    @property
    def full(self) -> bool:
        return self.cursor_pos >= self.capacity_records

    def append_record(self, delta_len: int) -> None:
        # Records past capacity are kept until the next commit writes the log back.
        if delta_len <= 0:
            raise InvariantError(f"log record with non-positive length {delta_len}")
        self.cursor_pos += 1
        self.uncommitted_file_len += delta_len

    def commit(self) -> bool:
        """Land a commit record; returns True when the log was written back and reset."""
        self.commit_pos = self.cursor_pos
        self.committed_file_len = self.uncommitted_file_len
        if self.cursor_pos >= self.writeback_threshold:
            self.cursor_pos = 0
            self.commit_pos = 0
            self.writeback_events += 1
            return True
        return False

    def rollback(self) -> bool:
        self.cursor_pos = self.commit_pos
        self.uncommitted_file_len = self.committed_file_len
        return self.cursor_pos == self.commit_pos
