"""Statistical reproduction of the wear study: orderings, N/A and HD cells, interval law."""
import numpy as np
import pytest

from icfs_wearsim.engine import run
from icfs_wearsim.failure import expected_appends_per_interval, interval_tail_probability
from icfs_wearsim.models import RunStatus, SimConfig
from icfs_wearsim.observations import observation_one_config, run_observation_one, run_observation_two
from icfs_wearsim.policies import PolicyKind

SEEDS = range(30)


def runs(policy, pfr, cf, seeds=SEEDS, **extra):
    return [run(SimConfig(pfr=pfr, cf=cf, policy=policy, seed=seed, **extra)) for seed in seeds]


def pooled(results, attr):
    return float(np.mean([getattr(r, attr) for r in results]))


@pytest.mark.slow
def test_interval_law_and_its_tail():
    report = run_observation_two(SimConfig(pfr=0.2, cf=10, policy="bl"), seeds=range(1000))
    expected = expected_appends_per_interval(0.2, 10)
    assert report.pooled.size >= 10 ** 4
    assert report.pooled_mean == pytest.approx(expected, rel=0.02)
    assert report.per_run["max_interval_appends"].max() >= 100

    empirical = float((report.pooled >= 138).mean())
    analytic = interval_tail_probability(0.2, 10, 138)
    assert empirical > 0
    assert 0.5 <= empirical / analytic <= 2.0


def test_failure_free_interval_is_exactly_cf():
    report = run_observation_two(SimConfig(pfr=0.0, cf=10, policy="bl"), seeds=range(3))
    assert set(report.pooled.tolist()) == {10}


@pytest.mark.slow
def test_buffered_wear_independent_of_failure_pattern():
    vectors = []
    for pfr in (0.2, 0.3, 0.4):
        for cf in (5, 10, 15, 20):
            result = run(SimConfig(pfr=pfr, cf=cf, policy="bf", seed=17, force_buffer_active=True,
                                   op_budget=200_000))
            if result.completed:
                vectors.append(result.wear)
    assert len(vectors) >= 10
    assert all(v == vectors[0] for v in vectors)


@pytest.mark.slow
@pytest.mark.parametrize("cf", [5, 10])
def test_policy_ordering(cf):
    sigma = {}
    mu = {}
    for kind in PolicyKind:
        results = runs(kind, 0.2, cf)
        assert all(r.completed for r in results)
        sigma[kind] = pooled(results, "sigma")
        mu[kind] = pooled(results, "mu")
    assert sigma[PolicyKind.BL] > sigma[PolicyKind.TP]
    assert sigma[PolicyKind.TP] >= sigma[PolicyKind.TM] - 1e-9
    assert sigma[PolicyKind.TM] > sigma[PolicyKind.BF]
    assert mu[PolicyKind.BF] < mu[PolicyKind.BL]


@pytest.mark.slow
@pytest.mark.parametrize("pfr, cf", [(0.2, 20), (0.3, 15)])
def test_swap_policies_exhaust(pfr, cf):
    for kind in (PolicyKind.TP, PolicyKind.TM):
        exhausted = sum(r.status is RunStatus.EXHAUSTED for r in runs(kind, pfr, cf))
        assert exhausted >= 28
    for kind in (PolicyKind.BL, PolicyKind.BF):
        assert all(r.completed for r in runs(kind, pfr, cf))


@pytest.mark.slow
def test_swap_policies_often_exhaust_at_moderate_load():
    exhausted = sum(r.status is RunStatus.EXHAUSTED for r in runs(PolicyKind.TP, 0.3, 10))
    assert exhausted >= 3


@pytest.mark.slow
@pytest.mark.parametrize("cf", [5, 10])
def test_threshold_swap_completes_at_low_load(cf):
    assert all(r.completed for r in runs(PolicyKind.TP, 0.2, cf))


@pytest.mark.slow
def test_extreme_cell_times_out_or_exhausts():
    for kind in (PolicyKind.BL, PolicyKind.BF):
        assert all(r.status is RunStatus.TIMEOUT for r in runs(kind, 0.4, 20, seeds=range(2)))
    for kind in (PolicyKind.TP, PolicyKind.TM):
        assert all(r.status is RunStatus.EXHAUSTED for r in runs(kind, 0.4, 20, seeds=range(2)))
    assert expected_appends_per_interval(0.4, 20) == pytest.approx(6.9e4, rel=0.02)


@pytest.mark.slow
def test_fragmentation_by_policy():
    bl = runs(PolicyKind.BL, 0.2, 10)
    bf = runs(PolicyKind.BF, 0.2, 10)
    tp = runs(PolicyKind.TP, 0.2, 10)
    for a, b in zip(bl, bf):
        assert a.frag == b.frag
    assert pooled(tp, "frag") < pooled(bl, "frag")


@pytest.mark.slow
def test_baseline_wear_grows_with_cf_and_pfr():
    along_cf = [runs(PolicyKind.BL, 0.2, cf) for cf in (5, 10, 15, 20)]
    along_pfr = [runs(PolicyKind.BL, pfr, 10) for pfr in (0.2, 0.3, 0.4)]
    for series in (along_cf, along_pfr):
        sigmas = [pooled(r, "sigma") for r in series]
        mus = [pooled(r, "mu") for r in series]
        assert sigmas == sorted(sigmas) and len(set(sigmas)) == len(sigmas)
        assert mus == sorted(mus) and len(set(mus)) == len(mus)


@pytest.mark.slow
def test_observation_one_hot_block():
    report = run_observation_one(observation_one_config(seed=1))
    assert report.result.completed
    assert report.max_write_count > 10 ** 4
    assert report.hot_share > 0.05
