from typing import Optional

import numpy as np

from .base import AllocationPolicy, PolicyKind
from .baseline import RandomPolicy
from .greedy import GreedyBufferedPolicy
from .threshold import MinWearSwapPolicy, ThresholdSwapPolicy

POLICIES = {
    PolicyKind.BL: RandomPolicy,
    PolicyKind.TP: ThresholdSwapPolicy,
    PolicyKind.TM: MinWearSwapPolicy,
    PolicyKind.BF: GreedyBufferedPolicy,
}


def make_policy(kind, swap_threshold: int = 30, rng: Optional[np.random.Generator] = None,
                count_migration_wear: bool = False) -> AllocationPolicy:
    return POLICIES[PolicyKind(kind)](swap_threshold=swap_threshold, rng=rng,
                                      count_migration_wear=count_migration_wear)
