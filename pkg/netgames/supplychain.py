"""
Single-commodity supply chain games. Players buy from their suppliers,
hold stock, and sell to their retailers; the most upstream players buy
raw material from a demand insensitive market and the most downstream
players sell to a price sensitive consumer market.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
import warnings

import numpy as np

from .environment import Environment
from .game import GameGraph, PlayerSpec
from .lib.utils import (ConfigError, NumericalFault, per_player, positive_part,
                        format_vector, require)

# The two player market
RAW_PRICE = 0.5
DEMAND_INTERCEPT = 10.0
DEMAND_SLOPE = 2.0
DEMAND_NOISE = 0.05

ORDER_BOUNDS = (0.0, 20.0)
PRICE_BOUNDS = (0.0, 10.0)


class RationingMode(str, Enum):
    """ How a short stock is split among retailers """
    EVEN_SPLIT = "even_split"
    PROPORTIONAL = "proportional"


class ConstantPrice(object):
    """ Raw material market with a fixed unit price, P(q) = price """

    def __init__(self, price: float=RAW_PRICE):
        if price < 0:
            raise ValueError(f"A unit price can not be negative: {price}")
        self.price = float(price)

    def __call__(self, quantity):
        return self.price


class LinearPrice(object):
    """ Raw material market where the unit price grows with the order,
    P(q) = base + slope * q
    """

    def __init__(self, base: float=RAW_PRICE, slope: float=0.0):
        if base < 0 or slope < 0:
            raise ValueError("Price base and slope must be nonnegative")
        self.base = float(base)
        self.slope = float(slope)

    def __call__(self, quantity):
        return self.base + self.slope * float(quantity)


class LinearDemand(object):
    """ Consumer market, Q(p) = intercept - slope * p + noise * ε,
    with ε standard normal and demand clipped at zero.
    """

    def __init__(self, intercept: float=DEMAND_INTERCEPT, slope: float=DEMAND_SLOPE,
                 noise: float=DEMAND_NOISE):
        if slope < 0:
            raise ValueError("Demand must not increase with price (slope >= 0)")
        if noise < 0:
            raise ValueError("Noise scale must be nonnegative")
        self.intercept = float(intercept)
        self.slope = float(slope)
        self.noise = float(noise)

    def expected(self, price):
        """ Noise free demand """
        return max(self.intercept - self.slope * float(price), 0.0)

    def __call__(self, price, rng: np.random.Generator):
        # Always draw, so the rng stream does not depend on the noise scale
        eps = rng.standard_normal()
        return max(self.intercept - self.slope * float(price) + self.noise * eps, 0.0)


def market_from(args: dict):
    """ Create a raw price or consumer demand function from a config dict """
    args = dict(args)
    kind = args.pop("type", None)
    if kind == "constant":
        return ConstantPrice(**args)
    elif kind == "linear_price":
        return LinearPrice(**args)
    elif kind == "linear":
        return LinearDemand(**args)
    raise ConfigError(f"Unknown market type: {kind}", field="type")


@dataclass
class SupplyState:
    """ s_i = [c_i, μ_i, x_i, y_i] """
    costs: np.ndarray  # unit prices charged by each supplier slot
    forecast: np.ndarray  # anticipated demand of each retailer slot
    stock: float
    pipeline: np.ndarray  # [y]_n arrives n steps ahead

    def as_vector(self):
        return np.concatenate([self.costs, self.forecast, [self.stock], self.pipeline])

    def check(self, player=None):
        for name in ["costs", "forecast", "stock", "pipeline"]:
            values = np.atleast_1d(getattr(self, name))
            if not np.all(np.isfinite(values)):
                raise NumericalFault(f"Non-finite {name}", player=player, field=name)
            if np.any(values < 0):
                raise ValueError(f"Player {player} has negative {name}")


@dataclass
class SupplyAction:
    """ a_i = [q_i, p_i]: orders per supplier slot, prices per retailer slot """
    orders: np.ndarray
    prices: np.ndarray

    def as_vector(self):
        return np.concatenate([self.orders, self.prices])

    def check(self, player=None):
        for name in ["orders", "prices"]:
            values = getattr(self, name)
            if not np.all(np.isfinite(values)):
                raise NumericalFault(f"Non-finite {name}", player=player, field=name)


@dataclass
class Deliveries:
    """ What happened to one player in a step """
    outgoing: np.ndarray  # d_ij per retailer slot
    incoming: np.ndarray  # d_ki per supplier slot
    demand: np.ndarray  # q_ji, orders received per retailer slot


def demand_gap(orders_received, stock: float):
    """ w_i = max{Σ_j q_ji - x_i, 0} """
    orders_received = np.asarray(orders_received, dtype=float)
    if np.any(orders_received < 0) or stock < 0:
        raise ValueError("Orders and stock must be nonnegative")
    return max(float(np.sum(orders_received)) - float(stock), 0.0)


def realized_deliveries(orders, stock: float, mode=RationingMode.PROPORTIONAL):
    """ d_ij for each retailer, given the orders q_ji and the stock x_i.

    Full orders are delivered when the stock covers them. Otherwise
    EVEN_SPLIT subtracts an even share of the gap from every order
    (which can deliver more than the stock when orders are uneven), and
    PROPORTIONAL scales every order by stock / total demand.

    :param orders: array of orders, or a {retailer: order} dict
    :returns: same type as `orders`
    """
    keys = None
    if isinstance(orders, dict):
        keys = list(orders.keys())
        orders = [orders[k] for k in keys]
    q = np.asarray(orders, dtype=float)
    if np.any(q < 0):
        raise ValueError("Orders must be nonnegative")
    if stock < 0:
        raise ValueError("Stock must be nonnegative")

    # No retailers means no demand, which any stock covers
    total = float(np.sum(q))
    if stock >= total:
        d = q.copy()
    elif RationingMode(mode) == RationingMode.EVEN_SPLIT:
        w = total - stock
        d = np.maximum(q - w / len(q), 0.0)
        if np.sum(d) > stock + 1e-9:
            warnings.warn(f"Even split delivers {np.sum(d):.4f} from a stock of {stock:.4f}")
    else:
        d = q * (stock / total)

    if keys is not None:
        return {k: float(x) for k, x in zip(keys, d)}
    return d


def forecast_update(prev_forecast, realized_demand, alpha: float):
    """ Exponential moving average, (1 - α) μ + α d """
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    return (1 - alpha) * prev_forecast + alpha * realized_demand


def reward_terms(state: SupplyState, action: SupplyAction, deliveries: Deliveries,
                 holding: float, goodwill: float):
    """ The four terms of a player's reward: revenue, cost, holding, goodwill """
    sold = float(np.sum(deliveries.outgoing))
    return {
        "revenue": float(np.dot(action.prices, deliveries.outgoing)),
        "cost": float(np.dot(state.costs, deliveries.incoming)),
        "holding": holding * positive_part(state.stock - sold),
        # charged on unmet demand
        "goodwill": goodwill * positive_part(float(np.sum(deliveries.demand)) - sold),
    }


def reward_supply(state: SupplyState, action: SupplyAction, deliveries: Deliveries,
                  holding: float, goodwill: float):
    """ R_i = revenue - cost - holding - goodwill. `state.costs` are the
    prices charged for this step's incoming deliveries.
    """
    terms = reward_terms(state, action, deliveries, holding, goodwill)
    return terms["revenue"] - terms["cost"] - terms["holding"] - terms["goodwill"]


@dataclass
class SupplyChainConfig:
    """ Topology, coefficients and markets of an N-player chain.
    An edge i -> j in the graph means i supplies j.
    """
    graph: GameGraph
    lead_time: list
    holding: list
    goodwill: list
    raw_price: object = field(default_factory=ConstantPrice)
    consumer_demand: object = field(default_factory=LinearDemand)
    rationing: RationingMode = RationingMode.PROPORTIONAL
    forecast_alpha: float = 0.3
    order_bounds: tuple = ORDER_BOUNDS
    price_bounds: tuple = PRICE_BOUNDS
    gamma: float = 0.95

    def __post_init__(self):
        n = self.graph.n_players
        self.lead_time = [int(x) for x in per_player(self.lead_time, n, "lead_time")]
        self.holding = [float(x) for x in per_player(self.holding, n, "holding")]
        self.goodwill = [float(x) for x in per_player(self.goodwill, n, "goodwill")]
        self.rationing = RationingMode(self.rationing)
        if any(x < 1 for x in self.lead_time):
            raise ValueError("Lead times must be at least 1")
        if any(x < 0 for x in self.holding + self.goodwill):
            raise ValueError("Holding and goodwill coefficients must be nonnegative")
        if not 0 < self.forecast_alpha <= 1:
            raise ValueError(f"forecast_alpha must be in (0, 1], got {self.forecast_alpha}")
        # raises on cycles
        self.graph.topological_order()

    def supplier_slots(self, i):
        """ Player indices of i's suppliers; None stands for the raw market """
        return self.graph.suppliers(i) or [None]

    def retailer_slots(self, i):
        """ Player indices of i's retailers; None stands for the consumer market """
        return self.graph.retailers(i) or [None]

    def player_spec(self, i):
        n_sup = len(self.supplier_slots(i))
        n_ret = len(self.retailer_slots(i))
        low = [self.order_bounds[0]] * n_sup + [self.price_bounds[0]] * n_ret
        high = [self.order_bounds[1]] * n_sup + [self.price_bounds[1]] * n_ret
        return PlayerSpec(state_dim=n_sup + n_ret + 1 + self.lead_time[i],
                          action_dim=n_sup + n_ret,
                          action_low=tuple(low), action_high=tuple(high),
                          gamma=self.gamma)

    def to_action(self, i, vector):
        """ Split an action vector into orders and prices, clipped to bounds """
        if isinstance(vector, SupplyAction):
            return vector
        spec = self.player_spec(i)
        vector = np.asarray(vector, dtype=float)
        if not np.all(np.isfinite(vector)):
            raise NumericalFault("Non-finite action", player=i, field="action")
        vector = spec.clip(vector)
        n_sup = len(self.supplier_slots(i))
        return SupplyAction(orders=vector[:n_sup], prices=vector[n_sup:])

    @classmethod
    def init_from(cls, args: dict):
        """Create a config from a Python object, e.g. a parsed config file."""
        graph = require(args, "graph")
        if not isinstance(graph, GameGraph):
            graph = GameGraph.init_from(graph)
        kwargs = {
            "graph": graph,
            "lead_time": args.get("lead_time", 1),
            "holding": args.get("holding", 0.05),
            "goodwill": args.get("goodwill", 0.1),
        }
        if "raw_price" in args:
            kwargs["raw_price"] = market_from(args["raw_price"])
        if "consumer_demand" in args:
            kwargs["consumer_demand"] = market_from(args["consumer_demand"])
        for k in ["rationing", "forecast_alpha", "gamma"]:
            if k in args:
                kwargs[k] = args[k]
        for k in ["order_bounds", "price_bounds"]:
            if k in args:
                kwargs[k] = tuple(float(x) for x in args[k])
        try:
            return cls(**kwargs)
        except ValueError as err:
            raise ConfigError(str(err))


def initial_supply_states(config: SupplyChainConfig, rng: np.random.Generator,
                          stock=0.0, stock_range=None):
    """ Cold start: no stock in transit, zero prices and forecasts.

    :param stock: initial stock, scalar or one per player
    :param stock_range: optional (low, high), draws each stock uniformly instead
    """
    n = config.graph.n_players
    if stock_range is not None:
        low, high = stock_range
        stocks = list(rng.uniform(low, high, size=n))
    else:
        stocks = per_player(stock, n, "stock")
    return [SupplyState(costs=np.zeros(len(config.supplier_slots(i))),
                        forecast=np.zeros(len(config.retailer_slots(i))),
                        stock=float(stocks[i]),
                        pipeline=np.zeros(config.lead_time[i]))
            for i in range(n)]


def step_supply_chain(config: SupplyChainConfig, state: list, action: list,
                      rng: np.random.Generator):
    """ One step of the N-player chain.

    :returns: (next states, rewards, info) where info holds the per-player
        Deliveries and the chain totals used by chain_metrics
    """
    n = config.graph.n_players
    if len(state) != n or len(action) != n:
        raise ValueError(f"Expected {n} states and actions")
    action = [config.to_action(i, a) for i, a in enumerate(action)]
    for i in range(n):
        state[i].check(player=i)
        action[i].check(player=i)

    # Orders received. Consumer demand is drawn in ascending player order.
    demand = []
    for i in range(n):
        row = []
        for k, j in enumerate(config.retailer_slots(i)):
            if j is None:
                row.append(config.consumer_demand(action[i].prices[k], rng))
            else:
                row.append(action[j].orders[config.supplier_slots(j).index(i)])
        demand.append(np.array(row, dtype=float))

    outgoing = [realized_deliveries(demand[i], state[i].stock, config.rationing)
                for i in range(n)]

    # Incoming deliveries, and the unit prices paid for them
    incoming, costs = [], []
    for i in range(n):
        inc, cost = [], []
        for k, j in enumerate(config.supplier_slots(i)):
            if j is None:
                # the raw market has unbounded supply
                inc.append(action[i].orders[k])
                cost.append(config.raw_price(action[i].orders[k]))
            else:
                r = config.retailer_slots(j).index(i)
                inc.append(outgoing[j][r])
                cost.append(action[j].prices[r])
        incoming.append(np.array(inc, dtype=float))
        costs.append(np.array(cost, dtype=float))

    deliveries, rewards, next_state = [], np.zeros(n), []
    for i in range(n):
        d = Deliveries(outgoing=outgoing[i], incoming=incoming[i], demand=demand[i])
        deliveries.append(d)
        priced = replace(state[i], costs=costs[i])
        rewards[i] = reward_supply(priced, action[i], d,
                                   config.holding[i], config.goodwill[i])
        if not np.isfinite(rewards[i]):
            raise NumericalFault("Non-finite reward", player=i, field="reward")

        pipeline = state[i].pipeline
        next_state.append(SupplyState(
            costs=costs[i],
            forecast=forecast_update(state[i].forecast, demand[i], config.forecast_alpha),
            stock=float(positive_part(state[i].stock - np.sum(outgoing[i])) + pipeline[0]),
            pipeline=np.concatenate([pipeline[1:], [np.sum(incoming[i])]]),
        ))

    sources = [i for i in range(n) if not config.graph.suppliers(i)]
    sinks = [i for i in range(n) if not config.graph.retailers(i)]
    info = {
        "deliveries": deliveries,
        "orders": [a.orders for a in action],
        "prices": [a.prices for a in action],
        "raw_orders": float(sum(np.sum(action[i].orders) for i in sources)),
        "sink_orders": float(sum(np.sum(action[i].orders) for i in sinks)),
        "consumer_delivered": float(sum(outgoing[i][-1] for i in sinks)),
    }
    return next_state, rewards, info


def chain_metrics(trajectory: list):
    """ (throughput, inefficiency) of a trajectory of step info dicts.

    Throughput is the total delivered to the consumer market. Inefficiency
    is Σ_t (raw material ordered - orders placed by consumer facing players)_+,
    i.e. Σ_t (q_0 - q_1)_+ in the two player chain.
    """
    throughput = sum(info["consumer_delivered"] for info in trajectory)
    inefficiency = sum(max(info["raw_orders"] - info["sink_orders"], 0.0)
                       for info in trajectory)
    return float(throughput), float(inefficiency)


def two_player_market(q0: float, p1: float, rng: np.random.Generator,
                      raw_price=None, consumer_demand=None):
    """ (raw unit price P(q_0), consumer demand Q(p_1)) of the two player chain """
    if q0 < 0 or p1 < 0:
        raise ValueError("Orders and prices must be nonnegative")
    raw_price = raw_price or ConstantPrice()
    consumer_demand = consumer_demand or LinearDemand()
    return raw_price(q0), consumer_demand(p1, rng)


def settle_two_player(stocks, action, raw_price: float, demand: float,
                      holding=(0.05, 0.05), goodwill=(0.1, 0.1)):
    """ Settle one step of the zero lead time, two player chain.

    Player 0 delivers d_10 = min{q_1, x_0} from stock, and its raw material
    order q_0 arrives at once. Player 1 sells from its stock plus d_10.
    Holding and goodwill terms reduce the rewards.

    :param stocks: (x_0, x_1)
    :param action: ((q_0, p_0), (q_1, p_1))
    """
    (q0, p0), (q1, p1) = action
    x0, x1 = stocks
    d10 = min(q1, x0)
    available = x1 + d10
    sold = min(demand, available)

    leftover0 = x0 - d10 + q0
    leftover1 = available - sold
    r0 = (p0 * d10 - raw_price * q0
          - holding[0] * positive_part(leftover0)
          - goodwill[0] * positive_part(q1 - d10))
    r1 = (p1 * sold - p0 * d10
          - holding[1] * positive_part(leftover1)
          - goodwill[1] * positive_part(demand - sold))
    return {
        "d10": d10, "sold": sold, "demand": demand,
        "stocks": (float(positive_part(leftover0)), float(positive_part(leftover1))),
        "rewards": (float(r0), float(r1)),
    }


def two_player_rewards(state, action, rng: np.random.Generator,
                       holding=(0.05, 0.05), goodwill=(0.1, 0.1),
                       raw_price=None, consumer_demand=None):
    """ (R_0, R_1, d_10) of the two player chain.

    :param state: two SupplyState objects, or the stocks (x_0, x_1)
    :param action: ((q_0, p_0), (q_1, p_1))
    """
    stocks = [s.stock if isinstance(s, SupplyState) else float(s) for s in state]
    (q0, p0), (q1, p1) = action
    price, demand = two_player_market(q0, p1, rng, raw_price, consumer_demand)
    out = settle_two_player(stocks, action, price, demand, holding, goodwill)
    r0, r1 = out["rewards"]
    return r0, r1, out["d10"]


class SupplyChain(Environment):
    """ N-player chain with lead times and rationed deliveries.

    State vectors are [c, μ, x, y] per player, action vectors [q, p]. The
    raw and consumer markets occupy one supplier / retailer slot of the
    source and sink players.
    """

    trajectory_columns = ["t", "player", "stock", "orders", "prices", "deliveries", "reward"]
    metric_names = ["throughput", "inefficiency"]

    def __init__(self, config: SupplyChainConfig, initial: dict=None):
        """
        :param config: chain topology, coefficients and markets
        :param initial: default keyword arguments for reset(), e.g. {"stock": 5}
        """
        self.config = config
        n = config.graph.n_players
        super(SupplyChain, self).__init__(config.graph,
                                          [config.player_spec(i) for i in range(n)])
        self.initial = dict(initial or {})

    def reset(self, rng, **initial):
        kwargs = dict(self.initial)
        kwargs.update(initial)
        return initial_supply_states(self.config, rng, **kwargs)

    def step(self, state, action, rng):
        return step_supply_chain(self.config, state, action, rng)

    def observed_states(self, state):
        return [s.as_vector() for s in state]

    def action_labels(self, i):
        n_sup = len(self.config.supplier_slots(i))
        n_ret = len(self.config.retailer_slots(i))
        orders = ["q"] if n_sup == 1 else [f"q{k}" for k in range(n_sup)]
        prices = ["p"] if n_ret == 1 else [f"p{k}" for k in range(n_ret)]
        return orders + prices

    def episode_metrics(self, infos):
        throughput, inefficiency = chain_metrics(infos)
        return {"throughput": throughput, "inefficiency": inefficiency}

    def trajectory_rows(self, t, state, action, rewards, info):
        return [{
            "t": t,
            "player": i,
            "stock": float(state[i].stock),
            "orders": format_vector(info["orders"][i]),
            "prices": format_vector(info["prices"][i]),
            "deliveries": format_vector(info["deliveries"][i].outgoing),
            "reward": float(rewards[i]),
        } for i in range(self.n_players)]

    @classmethod
    def init_from(cls, args: dict):
        return cls(SupplyChainConfig.init_from(args), initial=args.get("initial"))


class TwoPlayerSupplyChain(SupplyChain):
    """ Supplier (player 0) and retailer (player 1) between a raw material
    market and a consumer market, with zero lead time.

    State vectors are [c, μ, x] per player, action vectors [q, p].
    """

    def __init__(self, config: SupplyChainConfig=None, initial: dict=None):
        if config is None:
            config = SupplyChainConfig(GameGraph(2, [(0, 1)]), lead_time=1,
                                       holding=0.05, goodwill=0.1)
        if config.graph.n_players != 2 or config.graph.edges != frozenset([(0, 1)]):
            raise ValueError("The two player chain needs exactly the edge (0, 1)")
        super(TwoPlayerSupplyChain, self).__init__(config, initial=initial)
        # Nothing is ever in transit
        self.specs = [replace(sp, state_dim=3) for sp in self.specs]

    @classmethod
    def init_from(cls, args: dict):
        args = dict(args)
        args.setdefault("graph", {"n_players": 2, "edges": [[0, 1]]})
        return super(TwoPlayerSupplyChain, cls).init_from(args)

    def reset(self, rng, **initial):
        states = super(TwoPlayerSupplyChain, self).reset(rng, **initial)
        return [replace(s, pipeline=np.zeros(0)) for s in states]

    def step(self, state, action, rng):
        config = self.config
        action = [config.to_action(i, a) for i, a in enumerate(action)]
        for i in range(2):
            state[i].check(player=i)
            action[i].check(player=i)
        (q0,), (p0,) = action[0].orders, action[0].prices
        (q1,), (p1,) = action[1].orders, action[1].prices

        price, demand = two_player_market(q0, p1, rng, config.raw_price,
                                          config.consumer_demand)
        out = settle_two_player((state[0].stock, state[1].stock),
                                ((q0, p0), (q1, p1)), price, demand,
                                config.holding, config.goodwill)
        rewards = np.array(out["rewards"])
        for i in range(2):
            if not np.isfinite(rewards[i]):
                raise NumericalFault("Non-finite reward", player=i, field="reward")

        d10, sold = out["d10"], out["sold"]
        alpha = config.forecast_alpha
        next_state = [
            SupplyState(costs=np.array([price]),
                        forecast=forecast_update(state[0].forecast, np.array([q1]), alpha),
                        stock=out["stocks"][0], pipeline=np.zeros(0)),
            SupplyState(costs=np.array([p0]),
                        forecast=forecast_update(state[1].forecast, np.array([demand]), alpha),
                        stock=out["stocks"][1], pipeline=np.zeros(0)),
        ]
        deliveries = [
            Deliveries(outgoing=np.array([d10]), incoming=np.array([q0]),
                       demand=np.array([q1])),
            Deliveries(outgoing=np.array([sold]), incoming=np.array([d10]),
                       demand=np.array([demand])),
        ]
        info = {
            "deliveries": deliveries,
            "orders": [action[0].orders, action[1].orders],
            "prices": [action[0].prices, action[1].prices],
            "d10": d10,
            "raw_orders": float(q0),
            "sink_orders": float(q1),
            "consumer_delivered": float(sold),
        }
        return next_state, rewards, info


class MonopolyRetailer(SupplyChain):
    """ A single retailer with free and unlimited supply, choosing its price.
    The per step revenue p * Q(p) peaks at p = intercept / (2 * slope).

    State vector [μ] (demand forecast), action vector [p].
    """

    trajectory_columns = ["t", "player", "demand", "prices", "reward"]
    metric_names = ["throughput"]

    def __init__(self, config: SupplyChainConfig=None, initial: dict=None):
        if config is None:
            config = SupplyChainConfig(GameGraph(1), lead_time=1, holding=0.0, goodwill=0.0)
        if config.graph.n_players != 1:
            raise ValueError("The retailer game has exactly one player")
        super(MonopolyRetailer, self).__init__(config, initial=initial)
        low, high = config.price_bounds
        self.specs = [PlayerSpec(state_dim=1, action_dim=1, action_low=(low,),
                                 action_high=(high,), gamma=config.gamma)]

    @classmethod
    def init_from(cls, args: dict):
        args = dict(args)
        args.setdefault("graph", {"n_players": 1})
        args.setdefault("holding", 0.0)
        args.setdefault("goodwill", 0.0)
        return super(MonopolyRetailer, cls).init_from(args)

    def reset(self, rng, **initial):
        return [np.zeros(1)]

    def step(self, state, action, rng):
        (p,) = self.clip_actions(action)[0]
        forecast = np.asarray(state[0], dtype=float)
        demand = self.config.consumer_demand(p, rng)
        reward = p * demand
        if not np.isfinite(reward):
            raise NumericalFault("Non-finite reward", player=0, field="reward")
        next_state = [forecast_update(forecast, demand, self.config.forecast_alpha)]
        info = {"demand": demand, "prices": [np.array([p])], "consumer_delivered": demand}
        return next_state, np.array([reward]), info

    def observed_states(self, state):
        return [np.asarray(state[0], dtype=float)]

    def action_labels(self, i):
        return ["p"]

    def episode_metrics(self, infos):
        return {"throughput": float(sum(info["consumer_delivered"] for info in infos))}

    def trajectory_rows(self, t, state, action, rewards, info):
        return [{"t": t, "player": 0, "demand": float(info["demand"]),
                 "prices": format_vector(info["prices"][0]), "reward": float(rewards[0])}]
