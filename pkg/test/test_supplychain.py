import numpy as np
import pytest

from netgames import ENVIRONMENTS
from netgames.game import GameGraph
from netgames.lib.datalist import RecordList
from netgames.lib.utils import ConfigError, NumericalFault, load_config
from netgames.storage import DictStorage
from netgames.supplychain import (Deliveries, LinearDemand, MonopolyRetailer, RationingMode,
                                  SupplyAction, SupplyChain, SupplyChainConfig, SupplyState,
                                  TwoPlayerSupplyChain, chain_metrics, demand_gap,
                                  forecast_update, initial_supply_states, market_from,
                                  realized_deliveries, reward_supply, reward_terms,
                                  settle_two_player, step_supply_chain, two_player_market,
                                  two_player_rewards)
from .data import TWO_PLAYER_CONFIG, THREE_PLAYER_LINE, rollout


def _line(**kwargs):
    return SupplyChainConfig.init_from(dict(THREE_PLAYER_LINE, **kwargs))


def _random_actions(config, rng):
    n = config.graph.n_players
    return [rng.uniform(config.player_spec(i).low, config.player_spec(i).high)
            for i in range(n)]


def test_demand_gap():
    assert demand_gap([4.0, 6.0], 6.0) == 4.0
    assert demand_gap([1.0, 2.0], 6.0) == 0.0
    assert demand_gap([], 5.0) == 0.0
    with pytest.raises(ValueError):
        demand_gap([-1.0], 5.0)
    with pytest.raises(ValueError):
        demand_gap([1.0], -5.0)


def test_realized_deliveries_cases():
    even = RationingMode.EVEN_SPLIT
    assert realized_deliveries({"A": 5.0, "B": 5.0}, 6.0, even) == {"A": 3.0, "B": 3.0}
    assert realized_deliveries({"A": 5.0, "B": 1.0}, 4.0, even) == {"A": 4.0, "B": 0.0}
    prop = realized_deliveries({"A": 10.0, "B": 0.5}, 2.0, "proportional")
    assert prop["A"] == pytest.approx(10 * 2 / 10.5)
    assert prop["B"] == pytest.approx(0.5 * 2 / 10.5)
    # even split over-delivers on uneven orders
    with pytest.warns(UserWarning):
        assert sum(realized_deliveries([10.0, 0.5], 2.0, even)) > 2.0
    # stock covers demand
    assert np.array_equal(realized_deliveries([1.0, 2.0], 3.0, even), [1.0, 2.0])
    # a player without retailers delivers nothing, in either mode
    assert realized_deliveries({}, 0.0, even) == {}
    assert len(realized_deliveries([], 0.0)) == 0
    with pytest.raises(ValueError):
        realized_deliveries([-1.0], 3.0)


def test_proportional_rationing_is_feasible():
    rng = np.random.default_rng(0)
    for _ in range(10000):
        q = rng.uniform(0, 20, size=rng.integers(1, 6))
        stock = rng.uniform(0, 40)
        d = realized_deliveries(q, stock, RationingMode.PROPORTIONAL)
        assert np.sum(d) <= stock + 1e-9
        assert np.all(d >= 0) and np.all(d <= q + 1e-12)


def test_even_split_formula():
    rng = np.random.default_rng(1)
    checked = 0
    for _ in range(10000):
        q = rng.uniform(0, 20, size=rng.integers(1, 6))
        stock = rng.uniform(0, np.sum(q))
        w = np.sum(q) - stock
        if np.any(q < w / len(q)):
            continue
        d = realized_deliveries(q, stock, RationingMode.EVEN_SPLIT)
        assert np.array_equal(d, q - w / len(q))
        checked += 1
    assert checked > 100

    with pytest.warns(UserWarning):
        d = realized_deliveries([1.0, 9.0], 5.0, RationingMode.EVEN_SPLIT)
    assert np.array_equal(d, [0.0, 6.5])


def test_forecast_update():
    assert forecast_update(5.0, 5.0, 0.3) == pytest.approx(5.0)
    assert forecast_update(0.0, 10.0, 1.0) == 10.0
    assert forecast_update(4.0, 8.0, 0.5) == 6.0
    with pytest.raises(ValueError):
        forecast_update(1.0, 2.0, 0.0)


def _state(stock, costs=(0.0,), forecast=(0.0,), pipeline=()):
    return SupplyState(costs=np.array(costs, dtype=float),
                       forecast=np.array(forecast, dtype=float),
                       stock=stock, pipeline=np.array(pipeline, dtype=float))


def test_reward_cases():
    state = _state(6.0, costs=[0.5])
    action = SupplyAction(orders=np.array([6.0]), prices=np.array([2.0]))
    deliveries = Deliveries(outgoing=np.array([6.0]), incoming=np.array([6.0]),
                            demand=np.array([6.0]))
    assert reward_supply(state, action, deliveries, 0.05, 0.1) == 9.0

    idle = SupplyAction(orders=np.zeros(1), prices=np.zeros(1))
    nothing = Deliveries(outgoing=np.zeros(1), incoming=np.zeros(1), demand=np.zeros(1))
    assert reward_supply(_state(4.0), idle, nothing, 0.05, 0.1) == pytest.approx(-0.2)
    assert reward_supply(_state(0.0), idle, nothing, 0.05, 0.1) == 0.0


def _reward_by_hand(costs, stock, prices, outgoing, incoming, demand, h, g):
    revenue = 0.0
    for p, d in zip(prices, outgoing):
        revenue += p * d
    cost = 0.0
    for c, d in zip(costs, incoming):
        cost += c * d
    sold = sum(outgoing)
    leftover = stock - sold
    unmet = sum(demand) - sold
    return revenue - cost - h * (leftover if leftover > 0 else 0.0) \
        - g * (unmet if unmet > 0 else 0.0)


def test_reward_matches_hand_evaluation():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        n_sup, n_ret = rng.integers(1, 4, size=2)
        stock = rng.uniform(0, 30)
        demand = rng.uniform(0, 15, size=n_ret)
        outgoing = realized_deliveries(demand, stock, RationingMode.PROPORTIONAL)
        state = _state(stock, costs=rng.uniform(0, 5, size=n_sup),
                       forecast=rng.uniform(0, 10, size=n_ret),
                       pipeline=rng.uniform(0, 5, size=rng.integers(1, 4)))
        action = SupplyAction(orders=rng.uniform(0, 20, size=n_sup),
                              prices=rng.uniform(0, 10, size=n_ret))
        incoming = rng.uniform(0, 20, size=n_sup)
        h, g = rng.uniform(0, 1, size=2)
        deliveries = Deliveries(outgoing=outgoing, incoming=incoming, demand=demand)

        expected = _reward_by_hand(state.costs, stock, action.prices, outgoing, incoming,
                                   demand, h, g)
        assert abs(reward_supply(state, action, deliveries, h, g) - expected) < 1e-12
        terms = reward_terms(state, action, deliveries, h, g)
        recombined = terms["revenue"] - terms["cost"] - terms["holding"] - terms["goodwill"]
        assert abs(recombined - expected) < 1e-12


def _two_player_by_hand(x0, x1, q0, p0, q1, p1, demand, h, g):
    d10 = q1 if q1 < x0 else x0
    available = x1 + d10
    sold = demand if demand < available else available
    left0 = x0 - d10 + q0
    left1 = available - sold
    r0 = p0 * d10 - 0.5 * q0 - h[0] * max(left0, 0.0) - g[0] * max(q1 - d10, 0.0)
    r1 = p1 * sold - p0 * d10 - h[1] * max(left1, 0.0) - g[1] * max(demand - sold, 0.0)
    return r0, r1, d10


def test_two_player_rewards_match_hand_evaluation():
    rng = np.random.default_rng(3)
    for k in range(1000):
        x0, x1 = rng.uniform(0, 15, size=2)
        q0, q1 = rng.uniform(0, 20, size=2)
        p0, p1 = rng.uniform(0, 10, size=2)
        h = tuple(rng.uniform(0, 1, size=2))
        g = tuple(rng.uniform(0, 1, size=2))
        eps = np.random.default_rng(k).standard_normal()
        demand = max(10 - 2 * p1 + 0.05 * eps, 0.0)

        r0, r1, d10 = two_player_rewards((x0, x1), ((q0, p0), (q1, p1)),
                                         np.random.default_rng(k), holding=h, goodwill=g)
        e0, e1, e10 = _two_player_by_hand(x0, x1, q0, p0, q1, p1, demand, h, g)
        assert d10 == e10
        assert abs(r0 - e0) < 1e-12
        assert abs(r1 - e1) < 1e-12


def test_two_player_transfer_cases():
    rng = np.random.default_rng(4)
    assert two_player_rewards((5.0, 0.0), ((0.0, 1.0), (3.0, 2.0)), rng)[2] == 3.0
    assert two_player_rewards((5.0, 0.0), ((0.0, 1.0), (8.0, 2.0)), rng)[2] == 5.0
    states = initial_supply_states(SupplyChainConfig(GameGraph(2, [(0, 1)]), 1, 0.0, 0.0),
                                   rng, stock=[5.0, 0.0])
    assert two_player_rewards(states, ((0.0, 1.0), (3.0, 2.0)), rng)[2] == 3.0


def test_transfer_price_is_zero_sum():
    def rewards(p0):
        out = settle_two_player((6.0, 1.0), ((2.0, p0), (4.0, 3.0)), 0.5, 5.0,
                                holding=(0.0, 0.0), goodwill=(0.0, 0.0))
        return out["rewards"]

    h = 1e-5
    up, down = rewards(1.0 + h), rewards(1.0 - h)
    d_r0 = (up[0] - down[0]) / (2 * h)
    d_r1 = (up[1] - down[1]) / (2 * h)
    assert d_r0 == pytest.approx(4.0, rel=1e-6)
    assert d_r1 == pytest.approx(-4.0, rel=1e-6)


def test_two_player_market():
    rng = np.random.default_rng(5)
    quiet = LinearDemand(noise=0.0)
    assert two_player_market(3.0, 2.0, rng, consumer_demand=quiet) == (0.5, 6.0)
    assert two_player_market(0.0, 5.0, rng, consumer_demand=quiet)[1] == 0.0
    assert two_player_market(0.0, 9.0, rng)[1] == 0.0
    for q0 in [0.0, 1.0, 17.0]:
        assert two_player_market(q0, 1.0, rng)[0] == 0.5
    with pytest.raises(ValueError):
        two_player_market(-1.0, 1.0, rng)


def test_demand_is_nonincreasing():
    demand = LinearDemand()
    prices = np.linspace(0, 10, 101)
    expected = [demand.expected(p) for p in prices]
    assert all(a >= b for a, b in zip(expected, expected[1:]))


def test_market_from():
    assert market_from({"type": "constant", "price": 0.7})(10.0) == 0.7
    assert market_from({"type": "linear_price", "base": 1.0, "slope": 0.5})(2.0) == 2.0
    with pytest.raises(ConfigError):
        market_from({"type": "auction"})


def test_retailer_peak_revenue():
    env = MonopolyRetailer.init_from({"consumer_demand": {"type": "linear", "noise": 0.0}})
    rng = np.random.default_rng(6)
    state = env.reset(rng)
    revenue = {p: env.step(state, [[p]], rng)[1][0] for p in np.linspace(0, 5, 51)}
    best = max(revenue, key=revenue.get)
    assert best == pytest.approx(2.5)
    assert revenue[best] == pytest.approx(12.5)


def test_zero_trade_step():
    config = _line(consumer_demand={"type": "linear", "intercept": 0.0, "noise": 0.0})
    rng = np.random.default_rng(7)
    state = initial_supply_states(config, rng, stock=[3.0, 2.0, 1.0])
    state[1].pipeline = np.array([2.0, 7.0])
    action = [np.zeros(2)] * 3
    next_state, rewards, info = step_supply_chain(config, state, action, rng)
    for i, d in enumerate(info["deliveries"]):
        assert not np.any(d.outgoing)
    assert [s.stock for s in next_state] == [3.0, 4.0, 1.0]
    assert np.array_equal(next_state[1].pipeline, [7.0, 0.0])
    assert np.allclose(rewards, [-0.05 * 3.0, -0.05 * 2.0, -0.05 * 1.0])


def test_pipeline_shift():
    config = _line()
    rng = np.random.default_rng(8)
    state = initial_supply_states(config, rng, stock=[10.0, 0.0, 0.0])
    state[1].pipeline = np.array([2.0, 7.0])
    action = [np.array([0.0, 1.0]), np.array([3.0, 1.0]), np.array([0.0, 4.0])]
    next_state, _, info = step_supply_chain(config, state, action, rng)
    assert np.array_equal(next_state[1].pipeline, [7.0, 3.0])
    assert next_state[1].stock == 2.0
    assert next_state[0].stock == 7.0
    # suppliers set the costs their retailers face
    assert np.array_equal(next_state[1].costs, [1.0])
    assert np.array_equal(next_state[0].costs, [0.5])


def test_unmet_consumer_demand_costs_goodwill():
    env = TwoPlayerSupplyChain.init_from(dict(TWO_PLAYER_CONFIG, holding=0.0))
    rng = np.random.default_rng(9)
    state = env.reset(rng)
    _, rewards, info = env.step(state, [[0.0, 1.0], [0.0, 2.0]], rng)
    demand = info["deliveries"][1].demand[0]
    assert demand == pytest.approx(6.0, abs=0.5)
    assert rewards[1] == pytest.approx(-0.1 * demand)
    assert rewards[0] == 0.0


@pytest.mark.parametrize("rationing", list(RationingMode))
def test_edge_conservation_and_nonnegativity(rationing):
    config = _line(rationing=rationing)
    rng = np.random.default_rng(10)
    state = initial_supply_states(config, rng, stock_range=(0.0, 10.0))
    for _ in range(500):
        action = _random_actions(config, rng)
        next_state, _, info = step_supply_chain(config, state, action, rng)
        out = info["deliveries"]
        assert out[0].outgoing[0] == next_state[1].pipeline[-1] == out[1].incoming[0]
        assert out[1].outgoing[0] == next_state[2].pipeline[-1] == out[2].incoming[0]
        for s in next_state:
            assert s.stock >= 0 and np.all(s.pipeline >= 0)
        if rationing == RationingMode.PROPORTIONAL:
            for i in range(3):
                assert np.sum(out[i].outgoing) <= state[i].stock + 1e-9
        state = next_state


def test_step_rejects_nan():
    config = _line()
    rng = np.random.default_rng(11)
    state = initial_supply_states(config, rng)
    state[2].stock = np.nan
    with pytest.raises(NumericalFault) as err:
        step_supply_chain(config, state, [np.zeros(2)] * 3, rng)
    assert err.value.player == 2
    assert err.value.field == "stock"

    state = initial_supply_states(config, rng)
    action = [np.zeros(2), np.array([np.inf, 0.0]), np.zeros(2)]
    with pytest.raises(NumericalFault) as err:
        step_supply_chain(config, state, action, rng)
    assert err.value.player == 1


def test_chain_metrics():
    steps = [{"raw_orders": 5.0, "sink_orders": 3.0, "consumer_delivered": 4.0},
             {"raw_orders": 5.0, "sink_orders": 6.0, "consumer_delivered": 6.0}]
    assert chain_metrics(steps) == (10.0, 2.0)
    matched = [{"raw_orders": 2.0, "sink_orders": 2.0, "consumer_delivered": 1.0}] * 3
    assert chain_metrics(matched)[1] == 0.0


def test_config_errors():
    with pytest.raises(ConfigError):
        SupplyChainConfig.init_from({"graph": {"n_players": 2, "edges": [[0, 1]]},
                                     "lead_time": 0})
    with pytest.raises(ConfigError):
        SupplyChainConfig.init_from({"graph": {"n_players": 2, "edges": [[0, 1], [1, 0]]}})
    with pytest.raises(ConfigError):
        SupplyChainConfig.init_from({"lead_time": 1})
    with pytest.raises(ValueError):
        TwoPlayerSupplyChain(_line())


def test_player_specs():
    env = SupplyChain(_line())
    assert env.state_dims == [4, 5, 4]
    assert env.action_dims == [2, 2, 2]
    assert env.action_labels(0) == ["q", "p"]
    two = TwoPlayerSupplyChain.init_from(TWO_PLAYER_CONFIG)
    assert two.state_dims == [3, 3]
    obs = two.observed_states(two.reset(np.random.default_rng(0), stock=5.0))
    assert [len(o) for o in obs] == [3, 3]
    assert obs[0][2] == 5.0


def test_export_trajectory():
    env = TwoPlayerSupplyChain.init_from(TWO_PLAYER_CONFIG)
    rng = np.random.default_rng(12)

    def policy(t, obs):
        return [np.array([4.0, 2.0]), np.array([4.0, 3.0])]

    rows, infos, totals = env.simulate(policy, rng, 6, stock=5.0)
    assert len(rows) == 12
    assert totals.shape == (2,)
    assert set(env.episode_metrics(infos)) == {"throughput", "inefficiency"}

    container = {}
    env.export_trajectory(rows, "trajectory", DictStorage(container))
    parsed = RecordList.from_csv(container["trajectory.csv"])
    assert parsed.columns == ["t", "player", "stock", "orders", "prices", "deliveries",
                              "reward"]
    assert parsed.column("reward").sum() == pytest.approx(totals.sum())


@pytest.mark.parametrize("name", ["supply_chain", "supply_chain_2p", "retailer"])
def test_seeded_runs_repeat(name):
    def make():
        return ENVIRONMENTS[name].init_from(load_config(name)["env_config"])

    first = rollout(make(), seed=11)
    assert first.shape[0] == 1000
    assert np.all(np.isfinite(first))
    assert np.array_equal(rollout(make(), seed=11), first)
    assert not np.array_equal(rollout(make(), seed=12), first)
