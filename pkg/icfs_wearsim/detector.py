from dataclasses import dataclass
from enum import Enum

from .exceptions import ConfigurationError


class BufferStatus(str, Enum):
    ACTIVE = "Active"
    INACTIVE = "Inactive"


@dataclass
class DetectorState:
    """
    High-frequency power failure detector.

    Checkpoint signals count as successes and rollbacks that leave the cursor on the commit
    record count as failures; each kind of event zeroes the other counter. A failure streak
    reaching fail_threshold turns buffer mode on, a success streak reaching
    success_threshold turns it off.
    """
    fail_threshold: int = 3
    success_threshold: int = 3
    fail_count: int = 0
    success_count: int = 0
    buffer_status: BufferStatus = BufferStatus.INACTIVE

    def __post_init__(self):
        if self.fail_threshold < 1:
            raise ConfigurationError("fail_threshold must be at least 1", key="fail_threshold")
        if self.success_threshold < 1:
            raise ConfigurationError("success_threshold must be at least 1", key="success_threshold")

    @property
    def active(self) -> bool:
        return self.buffer_status is BufferStatus.ACTIVE

    def on_checkpoint_signal(self) -> bool:
        """Returns True when the buffer status changed."""
        before = self.buffer_status
        self.success_count += 1
        self.fail_count = 0
        if self.success_count >= self.success_threshold:
            self.buffer_status = BufferStatus.INACTIVE
        return self.buffer_status is not before

    def on_rollback_to_commit(self) -> bool:
        before = self.buffer_status
        self.fail_count += 1
        self.success_count = 0
        if self.fail_count >= self.fail_threshold:
            self.buffer_status = BufferStatus.ACTIVE
        return self.buffer_status is not before
