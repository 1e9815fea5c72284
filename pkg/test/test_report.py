import pytest

from netgames.epidemic import Epidemic
from netgames.opinion import Opinion
from netgames.report import NoSuccessfulRuns, summarize, summary_document
from netgames.training import RunRecord, record_columns
from .data import FIVE_CITIES, FOUR_OPINIONS

COLUMNS = ["seed", "episode", "reward_0", "total_reward"]


def _record(seed, rewards, failed=False, evaluation=None):
    record = RunRecord(seed, COLUMNS, failed=failed, evaluation=evaluation,
                       error="Non-finite reward" if failed else None)
    for k, r in enumerate(rewards):
        record.rows.append({"seed": seed, "episode": k, "reward_0": r, "total_reward": 2 * r})
    return record


def test_mean_and_variance():
    curves = summarize([_record(0, [2.0, 1.0]), _record(1, [4.0, 1.0])])
    assert curves.columns == ["episode", "reward_0_mean", "reward_0_var",
                              "total_reward_mean", "total_reward_var"]
    assert curves[0]["reward_0_mean"] == 3.0
    assert curves[0]["reward_0_var"] == 1.0
    assert curves[0]["total_reward_var"] == 4.0
    assert curves[1]["reward_0_var"] == 0.0
    assert [row["episode"] for row in curves] == [0, 1]


def test_one_seed_has_zero_variance():
    curves = summarize([_record(0, [2.0, 5.0, -1.0])])
    assert all(row["reward_0_var"] == 0.0 for row in curves)
    assert curves.column("reward_0_mean").tolist() == [2.0, 5.0, -1.0]


def test_failed_runs_are_left_out():
    records = [_record(0, [2.0]), _record(1, [], failed=True), _record(2, [4.0])]
    assert summarize(records)[0]["reward_0_mean"] == 3.0
    with pytest.raises(NoSuccessfulRuns):
        summarize([_record(1, [], failed=True)])


def test_unequal_lengths():
    with pytest.raises(ValueError):
        summarize([_record(0, [1.0, 2.0]), _record(1, [1.0])])


def test_absent_metrics_are_omitted():
    opinion = Opinion.init_from(FOUR_OPINIONS)
    epidemic = Epidemic.init_from(FIVE_CITIES)
    assert "throughput" not in record_columns(opinion)
    assert "final_spread" in record_columns(opinion)
    assert "throughput" not in record_columns(epidemic)

    record = RunRecord(0, record_columns(opinion))
    row = {c: 0.0 for c in record_columns(opinion)}
    record.rows.append(dict(row, seed=0, episode=0))
    columns = summarize([record]).columns
    assert "final_spread_mean" in columns
    assert not any(c.startswith("throughput") for c in columns)


def test_summary_document():
    evaluation = {"mean": {"reward_0": 1.0}, "var": {"reward_0": 0.0}}
    records = [_record(0, [2.0, 6.0], evaluation=evaluation),
               _record(1, [4.0, 2.0], evaluation={"mean": {"reward_0": 3.0},
                                                  "var": {"reward_0": 0.0}}),
               _record(2, [], failed=True)]
    doc = summary_document(records, {"env": "supply_chain_2p"}, window=1)
    assert doc["config"] == {"env": "supply_chain_2p"}
    assert doc["seeds"] == [0, 1, 2]
    assert doc["successful_runs"] == 2
    assert doc["failed_runs"] == [{"seed": 2, "error": "Non-finite reward"}]
    assert doc["final_window"] == 1
    # the last episode only: 6 and 2
    assert doc["final"]["reward_0"] == {"mean": 4.0, "var": 4.0}
    assert doc["evaluation"]["reward_0"] == {"mean": 2.0, "var": 1.0}


def test_run_record_summary():
    record = _record(3, [1.0, 2.0, 3.0, 4.0])
    summary = record.summary(window=2)
    assert summary["final"]["reward_0"] == 3.5
    assert summary["episodes"] == 4
    assert not summary["failed"]
    assert record.summary(window=500)["final"]["reward_0"] == 2.5
