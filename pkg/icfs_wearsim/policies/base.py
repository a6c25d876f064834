from abc import ABC, abstractmethod
from enum import Enum
from typing import List, Optional

import numpy as np

from ..exceptions import ConfigurationError, ExhaustedError
from ..nvm import BlockTable


class PolicyKind(str, Enum):
    BL = "bl"
    TP = "tp"
    TM = "tm"
    BF = "bf"


class AllocationPolicy(ABC):
    """
    Chooses the block the next append goes to and, for swap policies, when a worn block
    is exchanged for a fresh one.
    """
    kind: PolicyKind
    uses_buffer = False

    def __init__(self, swap_threshold: int = 30, rng: Optional[np.random.Generator] = None,
                 count_migration_wear: bool = False):
        if swap_threshold < 1:
            raise ConfigurationError("swap_threshold must be at least 1", key="swap_threshold")
        self.swap_threshold = swap_threshold
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.count_migration_wear = count_migration_wear
        self.swaps = 0
        self.last_migration_units = 0

    @abstractmethod
    def choose(self, table: BlockTable, candidates: List[int]) -> int:
        pass

    def select_next_block(self, table: BlockTable) -> int:
        """Pick an unallocated block and allocate it."""
        candidates = table.unallocated()
        if not candidates:
            raise ExhaustedError(f"no unallocated block left ({table.used_count} of {len(table)} in use)")
        block = self.choose(table, candidates)
        table.allocate(block)
        return block

    def maybe_swap(self, table: BlockTable, current: int) -> Optional[int]:
        """Returns the replacement block when current was swapped out, otherwise None."""
        return None

    def pick_random(self, candidates: List[int]) -> int:
        return candidates[int(self.rng.integers(len(candidates)))]


def pick_least_worn(table: BlockTable, candidates: List[int]) -> int:
    # Candidates are in ascending id order, so min() keeps the lowest id on ties.
    return min(candidates, key=lambda b: table[b].write_count)
