import logging
from typing import List, Optional

from ..exceptions import ExhaustedError
from ..nvm import BlockTable
from .base import AllocationPolicy, PolicyKind, pick_least_worn

logger = logging.getLogger(__name__)


class ThresholdSwapPolicy(AllocationPolicy):
    """
    TP: once the block being written reaches swap_threshold writes, its contents move to
    another unallocated block and the worn block is retired.

    The replacement is drawn at random from never-written blocks first, then from blocks
    still under the threshold, then from any unallocated block.
    """
    kind = PolicyKind.TP

    def choose(self, table: BlockTable, candidates: List[int]) -> int:
        return self.pick_random(candidates)

    def choose_replacement(self, table: BlockTable, candidates: List[int]) -> int:
        for tier in (
            [b for b in candidates if table[b].write_count == 0],
            [b for b in candidates if table[b].write_count < self.swap_threshold],
            candidates,
        ):
            if tier:
                return self.pick_random(tier)

    def maybe_swap(self, table: BlockTable, current: int) -> Optional[int]:
        if table[current].write_count < self.swap_threshold:
            return None
        candidates = table.unallocated()
        if not candidates:
            raise ExhaustedError(
                f"block {current} reached {table[current].write_count} writes and no unallocated block is left"
            )
        replacement = self.choose_replacement(table, candidates)
        table.allocate(replacement)
        units = table.copy_block(current, replacement, counted=self.count_migration_wear)
        table.retire(current)
        self.swaps += 1
        self.last_migration_units = units
        logger.debug(f"Swapped block {current} -> {replacement} ({units} migration units)")
        return replacement


class MinWearSwapPolicy(ThresholdSwapPolicy):
    """TM: like TP, but the replacement is always the least-written unallocated block."""
    kind = PolicyKind.TM

    def choose_replacement(self, table: BlockTable, candidates: List[int]) -> int:
        return pick_least_worn(table, candidates)
