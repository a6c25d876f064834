import numpy as np
import pytest

from icfs_wearsim.exceptions import ConfigurationError, ExhaustedError
from icfs_wearsim.nvm import BlockStatus, BlockTable, NvmGeometry
from icfs_wearsim.policies import POLICIES, PolicyKind, make_policy
from icfs_wearsim.policies.threshold import MinWearSwapPolicy, ThresholdSwapPolicy


@pytest.fixture
def table():
    return BlockTable(NvmGeometry(total_bytes=4096, data_region_bytes=4096, block_size=512))


def wear(table, block, units):
    state = table[block]
    state.write_count += units


def test_every_kind_has_a_policy():
    assert set(POLICIES) == set(PolicyKind)
    for kind in PolicyKind:
        assert make_policy(kind.value).kind is kind


def test_only_bf_uses_the_buffer():
    assert [k for k in PolicyKind if make_policy(k).uses_buffer] == [PolicyKind.BF]


def test_swap_threshold_must_be_positive():
    with pytest.raises(ConfigurationError):
        make_policy("tp", swap_threshold=0)


def test_random_choice_is_seeded(table):
    picks = [make_policy("bl", rng=np.random.default_rng(5)).select_next_block(BlockTable(table.geometry))
             for _ in range(3)]
    assert len(set(picks)) == 1


def test_selection_allocates(table):
    block = make_policy("bl").select_next_block(table)
    assert table[block].status is BlockStatus.ALLOCATED


def test_exhaustion_when_no_block_is_free(table):
    policy = make_policy("bl")
    for _ in range(len(table)):
        policy.select_next_block(table)
    with pytest.raises(ExhaustedError):
        policy.select_next_block(table)


def test_bf_picks_least_worn_lowest_id(table):
    wear(table, 0, 5)
    wear(table, 1, 2)
    wear(table, 2, 2)
    for b in range(3, 8):
        wear(table, b, 9)
    assert make_policy("bf").select_next_block(table) == 1


def test_bl_never_swaps(table):
    policy = make_policy("bl")
    block = policy.select_next_block(table)
    wear(table, block, 1000)
    assert policy.maybe_swap(table, block) is None


def test_tp_swaps_at_threshold(table):
    policy = ThresholdSwapPolicy(swap_threshold=30, rng=np.random.default_rng(1))
    table.allocate(0)
    table.record_write(0, 16 * 29, offset=0)
    assert policy.maybe_swap(table, 0) is None
    table.record_write(0, 16)
    replacement = policy.maybe_swap(table, 0)
    assert replacement is not None and replacement != 0
    assert table[0].status is BlockStatus.RETIRED
    assert table[replacement].status is BlockStatus.ALLOCATED
    assert table[replacement].fill == 480
    assert table.read(replacement, 0, 480) == table.read(0, 0, 480)
    assert table[replacement].write_count == 0
    assert policy.swaps == 1


def test_migration_wear_counts_when_enabled(table):
    policy = ThresholdSwapPolicy(swap_threshold=30, count_migration_wear=True)
    table.allocate(0)
    table.record_write(0, 16 * 30, offset=0)
    replacement = policy.maybe_swap(table, 0)
    assert table[replacement].write_count == 30


def test_tp_prefers_never_written_blocks(table):
    for b in range(1, 7):
        wear(table, b, 3)
    policy = ThresholdSwapPolicy(swap_threshold=30, rng=np.random.default_rng(0))
    table.allocate(0)
    wear(table, 0, 40)
    assert policy.maybe_swap(table, 0) == 7


def test_tp_falls_back_to_under_threshold(table):
    for b in range(1, 8):
        wear(table, b, 50)
    wear(table, 4, -45)
    policy = ThresholdSwapPolicy(swap_threshold=30)
    table.allocate(0)
    wear(table, 0, 40)
    assert policy.maybe_swap(table, 0) == 4


def test_tm_takes_least_worn(table):
    for b, units in zip(range(1, 8), [9, 8, 7, 3, 5, 3, 8]):
        wear(table, b, units)
    policy = MinWearSwapPolicy(swap_threshold=30)
    table.allocate(0)
    wear(table, 0, 30)
    assert policy.maybe_swap(table, 0) == 4


def test_swap_without_free_block_exhausts(table):
    policy = make_policy("tm")
    for _ in range(len(table)):
        policy.select_next_block(table)
    wear(table, 0, 30)
    with pytest.raises(ExhaustedError):
        policy.maybe_swap(table, 0)
