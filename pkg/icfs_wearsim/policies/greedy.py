from typing import List

from ..nvm import BlockTable
from .base import AllocationPolicy, PolicyKind, pick_least_worn


class GreedyBufferedPolicy(AllocationPolicy):
    """BF: least-written unallocated block, with appends staged in the SRAM buffer while failures are frequent."""
    kind = PolicyKind.BF
    uses_buffer = True

    def choose(self, table: BlockTable, candidates: List[int]) -> int:
        return pick_least_worn(table, candidates)
