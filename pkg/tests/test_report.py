import os

import pandas as pd
import pytest

from icfs_wearsim.api import build_config, build_report, build_sweep_spec, run_simulation, run_sweep
from icfs_wearsim.exceptions import ResultsError
from icfs_wearsim.report import expected_intervals


@pytest.fixture(scope="module")
def sweep_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep")
    spec = build_sweep_spec({"pfr_list": [0.2], "cf_list": [10], "policies": ["bl", "bf"],
                             "replicates": 2, "output_dir": str(out)})
    run_sweep(spec, silent=True)
    return str(out)


def test_sweep_report_files(sweep_dir, tmp_path):
    written = build_report(sweep_dir, str(tmp_path))
    assert set(written) == {"write_distribution", "policy_comparison", "buffer_sizes",
                            "interval_distribution", "expected_intervals"}

    distribution = pd.read_csv(written["write_distribution"])
    assert list(distribution.columns) == ["policy", "pfr", "cf", "replicate", "block_id", "write_count"]
    assert len(distribution) == 2 * 2 * 200

    comparison = pd.read_csv(written["policy_comparison"])
    assert list(comparison["policy"]) == ["bl", "bf"]
    assert (comparison["completed"] == 2).all()

    buffers = pd.read_csv(written["buffer_sizes"])
    assert set(buffers["policy"]) == {"bf"}
    assert list(buffers.columns[-4:]) == ["checkpoint_index", "r_len_bytes", "capacity_bytes", "records_at_commit"]

    intervals = pd.read_csv(written["interval_distribution"])
    assert list(intervals.columns) == ["policy", "pfr", "cf", "appends", "count", "empirical_tail", "analytic_tail"]
    assert intervals.groupby("policy")["count"].sum().tolist() == [50, 50]

    expected = pd.read_csv(written["expected_intervals"])
    assert expected.loc[0, "expected_appends"] == pytest.approx(41.57)
    assert expected.loc[0, "expected_amplification"] == pytest.approx(4.16)


def test_run_dir_report(tmp_path):
    run_dir = str(tmp_path / "run")
    run_simulation(build_config({"pfr": 0.2, "cf": 10, "policy": "tp", "seed": 4}), out_dir=run_dir, silent=True)
    written = build_report(run_dir)
    distribution = pd.read_csv(written["write_distribution"])
    assert len(distribution) == 200
    assert set(distribution["replicate"]) == {0}
    assert os.path.dirname(written["buffer_sizes"]) == run_dir


def test_expected_intervals_document_extreme_cell():
    frame = expected_intervals(pd.DataFrame({"pfr": [0.4, 0.0], "cf": [20, 10]}))
    assert float(frame.loc[0, "expected_appends"]) == pytest.approx(6.84e4, rel=0.01)
    assert frame.loc[1, "expected_appends"] == "10.00"


def test_empty_results_dir_lists_missing_inputs(tmp_path):
    with pytest.raises(ResultsError) as info:
        build_report(str(tmp_path))
    assert "summary.csv" in info.value.missing
    assert "summary.csv" in str(info.value)
