from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np
import pandas as pd

from .exceptions import ConfigurationError, InvariantError

# Wear is counted in 16B units: one increment per atomic append-sized write.
WRITE_UNIT = 16


def write_units(nbytes: int) -> int:
    return -(-nbytes // WRITE_UNIT)


class BlockStatus(str, Enum):
    UNALLOCATED = "Unallocated"
    ALLOCATED = "Allocated"
    RETIRED = "Retired"


@dataclass(frozen=True)
class NvmGeometry:
    total_bytes: int = 131072
    data_region_bytes: int = 102400
    block_size: int = 512

    def __post_init__(self):
        if self.block_size <= 0:
            raise ConfigurationError("geometry.block_size must be positive", key="block_size")
        if self.data_region_bytes <= 0 or self.data_region_bytes % self.block_size:
            raise ConfigurationError(
                f"geometry.data_region_bytes ({self.data_region_bytes}) must be a positive multiple "
                f"of block_size ({self.block_size})",
                key="data_region_bytes",
            )
        if self.data_region_bytes > self.total_bytes:
            raise ConfigurationError(
                f"geometry.data_region_bytes ({self.data_region_bytes}) exceeds total_bytes ({self.total_bytes})",
                key="data_region_bytes",
            )

    @property
    def block_count(self) -> int:
        return self.data_region_bytes // self.block_size


@dataclass
class BlockState:
    id: int
    status: BlockStatus = BlockStatus.UNALLOCATED
    fill: int = 0
    write_count: int = 0


class BlockTable:
    """
    The user-data block region together with its visit information table.

    Every block carries a wear counter that only ever grows, an allocation status and a
    fill level. The cell contents are kept as well so that committed file bytes can be
    compared across policies.
    """

    def __init__(self, geometry: Optional[NvmGeometry] = None):
        self.geometry = geometry or NvmGeometry()
        self.blocks: List[BlockState] = [BlockState(i) for i in range(self.geometry.block_count)]
        self.cells = bytearray(self.geometry.data_region_bytes)
        self.units_written = 0

    def __len__(self):
        return len(self.blocks)

    def __getitem__(self, block: int) -> BlockState:
        return self.blocks[block]

    def record_write(self, block: int, nbytes: int, offset: Optional[int] = None,
                     data: Optional[bytes] = None, counted: bool = True) -> int:
        """
        Write nbytes into block at offset (default: append at the current fill).

        Re-writes below the fill level leave it unchanged; wear is charged either way.
        Returns the number of wear units charged.
        """
        state = self.blocks[block]
        if state.status is not BlockStatus.ALLOCATED:
            raise InvariantError(f"write to block {block} in state {state.status.value}")
        if nbytes <= 0:
            raise InvariantError(f"write of {nbytes} bytes to block {block}")
        start = state.fill if offset is None else offset
        end = start + nbytes
        if start < 0 or end > self.geometry.block_size:
            raise InvariantError(
                f"write [{start}, {end}) overruns block {block} of {self.geometry.block_size} bytes"
            )
        if data is not None:
            base = block * self.geometry.block_size
            self.cells[base + start:base + end] = data
        if end > state.fill:
            state.fill = end
        units = write_units(nbytes) if counted else 0
        state.write_count += units
        self.units_written += units
        return units

    def allocate(self, block: int) -> None:
        state = self.blocks[block]
        if state.status is not BlockStatus.UNALLOCATED:
            raise InvariantError(f"allocate block {block} in state {state.status.value}")
        state.status = BlockStatus.ALLOCATED
        state.fill = 0

    def retire(self, block: int) -> None:
        state = self.blocks[block]
        if state.status is not BlockStatus.ALLOCATED:
            raise InvariantError(f"retire block {block} in state {state.status.value}")
        state.status = BlockStatus.RETIRED

    def copy_block(self, source: int, destination: int, counted: bool = True) -> int:
        """Migrate the valid fill of source into destination; returns wear units charged."""
        fill = self.blocks[source].fill
        if fill == 0:
            return 0
        base = source * self.geometry.block_size
        return self.record_write(destination, fill, offset=0,
                                 data=bytes(self.cells[base:base + fill]), counted=counted)

    def read(self, block: int, start: int, nbytes: int) -> bytes:
        base = block * self.geometry.block_size
        return bytes(self.cells[base + start:base + start + nbytes])

    def release(self) -> None:
        """Return allocated blocks to the free pool for a new experiment; wear and retirement persist."""
        for state in self.blocks:
            if state.status is BlockStatus.ALLOCATED:
                state.status = BlockStatus.UNALLOCATED
                state.fill = 0

    def unallocated(self) -> List[int]:
        return [s.id for s in self.blocks if s.status is BlockStatus.UNALLOCATED]

    @property
    def used_count(self) -> int:
        return sum(1 for s in self.blocks if s.status is not BlockStatus.UNALLOCATED)

    def write_counts(self) -> np.ndarray:
        return np.fromiter((s.write_count for s in self.blocks), dtype=np.int64, count=len(self.blocks))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "block_id": [s.id for s in self.blocks],
                "status": [s.status.value for s in self.blocks],
                "write_count": [s.write_count for s in self.blocks],
                "fill": [s.fill for s in self.blocks],
            }
        )
