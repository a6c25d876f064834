from typing import List

from ..nvm import BlockTable
from .base import AllocationPolicy, PolicyKind


class RandomPolicy(AllocationPolicy):
    """BL: any unallocated block, uniformly at random; blocks are never exchanged."""
    kind = PolicyKind.BL

    def choose(self, table: BlockTable, candidates: List[int]) -> int:
        return self.pick_random(candidates)
