import pytest

from netgames.lib.datalist import RecordList


def test_csv():
    rl = RecordList(columns=["episode", "reward_0"])
    rl.append({"episode": 0, "reward_0": 0.1})
    rl.append({"reward_0": 1 / 3, "episode": 1})
    rows = rl.as_csv.split("\n")
    assert rows[0] == "episode,reward_0"
    assert rows[1] == "0,0.1"
    assert rows[2] == "1,0.3333333333333333"


def test_floats_parse_back():
    rl = RecordList({"episode": 0, "reward_0": 2 / 3, "prices": "1.5 2.0"})
    parsed = RecordList.from_csv(rl.as_csv)
    assert parsed.columns == ["episode", "reward_0", "prices"]
    assert parsed[0]["reward_0"] == 2 / 3
    assert parsed[0]["prices"] == "1.5 2.0"


def test_schema_is_fixed():
    rl = RecordList({"episode": 0, "reward_0": 1.0})
    with pytest.raises(ValueError):
        rl.append({"episode": 1})
    with pytest.raises(ValueError):
        rl.append({"episode": 1, "reward_0": 1.0, "reward_1": 2.0})
    with pytest.raises(ValueError):
        rl.append([1, 2.0])
    assert len(rl) == 1


def test_column():
    rl = RecordList(*[{"episode": k, "reward_0": 2.0 * k} for k in range(4)])
    assert rl.column("reward_0").tolist() == [0.0, 2.0, 4.0, 6.0]
    rl[0] = {"episode": 0, "reward_0": 9.0}
    del rl[3]
    assert rl.column("reward_0").tolist() == [9.0, 2.0, 4.0]
    assert RecordList(columns=["a"]).columns == ["a"]
    assert RecordList().columns == []
