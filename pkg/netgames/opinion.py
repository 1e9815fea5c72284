"""
Leader-follower opinion dynamics on a social network. Players hold
opinions on a number of topics and steer them; disagreement with
neighbors and control effort are both costly.
"""
from dataclasses import dataclass
import numpy as np

from .environment import Environment
from .game import GameGraph, PlayerSpec
from .lib.utils import ConfigError, NumericalFault, format_vector, per_player, require


@dataclass
class OpinionConfig:
    """ Undirected graph with symmetric weights a_ij, and per player linear
    dynamics x' = A_i x + B_i u.
    """
    graph: GameGraph
    topic_dim: int = 2
    A: list = None
    B: list = None
    disagreement_cost: list = 1.0
    control_cost: list = 0.1
    leader: int = 0
    control_bound: float = 1.0
    gamma: float = 0.95

    def __post_init__(self):
        n, S = self.graph.n_players, int(self.topic_dim)
        if S < 1:
            raise ValueError("topic_dim must be positive")
        self.topic_dim = S
        for (i, j) in self.graph.edges:
            if self.graph.weight(i, j) != self.graph.weight(j, i) or (j, i) not in self.graph.edges:
                raise ValueError(f"Opinion graphs must be undirected; check edge ({i}, {j})")
        self.A = self._matrices(self.A, "A")
        self.B = self._matrices(self.B, "B")
        self.disagreement_cost = [float(x) for x in
                                  per_player(self.disagreement_cost, n, "disagreement_cost")]
        self.control_cost = [float(x) for x in per_player(self.control_cost, n, "control_cost")]
        if any(x <= 0 for x in self.disagreement_cost + self.control_cost):
            raise ValueError("Disagreement and control costs must be positive")
        if not 0 <= self.leader < n:
            raise ValueError(f"Leader {self.leader} is not a player")
        if self.control_bound <= 0:
            raise ValueError("control_bound must be positive")

    def _matrices(self, value, name):
        n, S = self.graph.n_players, self.topic_dim
        if value is None:
            return [np.eye(S) for _ in range(n)]
        arr = np.asarray(value, dtype=float)
        if arr.shape == (S, S):
            return [arr.copy() for _ in range(n)]
        if arr.shape == (n, S, S):
            return [m for m in arr]
        raise ValueError(f"{name} must be a {S}x{S} matrix or one per player")


def observe_error(config: OpinionConfig, states: list, i: int):
    """ e_i = Σ_{j ∈ N_i} a_ij (x_i - x_j), the only thing player i observes """
    x = [np.asarray(s, dtype=float) for s in states]
    e = np.zeros(config.topic_dim)
    for j in config.graph.neighbors(i):
        e += config.graph.weight(i, j) * (x[i] - x[j])
    return e


def step_opinion(config: OpinionConfig, states: list, actions: list):
    """ x_i' = A_i x_i + B_i u_i. Rewards are the negated quadratic costs,
    -(Σ_j ||x_i - x_j||² Q_ii + ||u_i||² R_ii), evaluated at the current
    opinions.
    """
    n = config.graph.n_players
    if len(states) != n or len(actions) != n:
        raise ValueError(f"Expected {n} states and actions")
    x = [np.asarray(s, dtype=float) for s in states]
    u = [np.asarray(a, dtype=float) for a in actions]
    for i in range(n):
        if x[i].shape != (config.topic_dim,) or u[i].shape != (config.topic_dim,):
            raise ValueError(f"Player {i} opinion and control must have length {config.topic_dim}")
        if not (np.all(np.isfinite(x[i])) and np.all(np.isfinite(u[i]))):
            raise NumericalFault("Non-finite opinion or control", player=i, field="state")

    next_states = [config.A[i] @ x[i] + config.B[i] @ u[i] for i in range(n)]
    rewards = np.zeros(n)
    for i in range(n):
        disagreement = sum(float(np.sum((x[i] - x[j]) ** 2))
                           for j in config.graph.neighbors(i))
        rewards[i] = -(disagreement * config.disagreement_cost[i]
                       + float(np.sum(u[i] ** 2)) * config.control_cost[i])
    info = {
        "controls": u,
        "errors": [observe_error(config, x, i) for i in range(n)],
        "spread": float(np.max(np.ptp(np.array(next_states), axis=0))),
    }
    return next_states, rewards, info


class Opinion(Environment):
    """ Opinion dynamics game. Players observe only their net error e_i.

    Observed state vectors e_i, action vectors u_i in [-u_max, u_max]^S.
    """

    trajectory_columns = ["t", "player", "x", "u", "e", "reward"]
    metric_names = ["final_spread"]

    def __init__(self, config: OpinionConfig, initial: dict=None):
        self.config = config
        S, bound = config.topic_dim, config.control_bound
        specs = [PlayerSpec(state_dim=S, action_dim=S, action_low=(-bound,) * S,
                            action_high=(bound,) * S, gamma=config.gamma)
                 for _ in range(config.graph.n_players)]
        super(Opinion, self).__init__(config.graph, specs)
        self.initial = dict(initial or {})

    @property
    def leader(self):
        return self.config.leader

    def reset(self, rng, **initial):
        """
        :param opinions: initial opinions, one vector per player. Drawn
            uniformly from [-1, 1] if not given.
        """
        kwargs = dict(self.initial)
        kwargs.update(initial)
        n, S = self.n_players, self.config.topic_dim
        if kwargs.get("opinions") is not None:
            opinions = np.asarray(kwargs["opinions"], dtype=float)
            if opinions.shape != (n, S):
                raise ValueError(f"Initial opinions must have shape ({n}, {S})")
            return [x.copy() for x in opinions]
        low, high = kwargs.get("opinion_range", (-1.0, 1.0))
        return [x for x in rng.uniform(low, high, size=(n, S))]

    def step(self, state, action, rng):
        return step_opinion(self.config, state, self.clip_actions(action))

    def observed_states(self, state):
        return [observe_error(self.config, state, i) for i in range(self.n_players)]

    def action_labels(self, i):
        return [f"u{k}" for k in range(self.config.topic_dim)]

    def episode_metrics(self, infos):
        if not infos:
            return {"final_spread": 0.0}
        return {"final_spread": infos[-1]["spread"]}

    def trajectory_rows(self, t, state, action, rewards, info):
        return [{
            "t": t,
            "player": i,
            "x": format_vector(state[i]),
            "u": format_vector(info["controls"][i]),
            "e": format_vector(info["errors"][i]),
            "reward": float(rewards[i]),
        } for i in range(self.n_players)]

    @classmethod
    def init_from(cls, args: dict):
        graph = require(args, "graph")
        if not isinstance(graph, GameGraph):
            graph = GameGraph.init_from(dict(graph, undirected=True))
        kwargs = {k: args[k] for k in ["topic_dim", "A", "B", "disagreement_cost",
                                       "control_cost", "leader", "control_bound", "gamma"]
                  if k in args}
        try:
            config = OpinionConfig(graph=graph, **kwargs)
        except ValueError as err:
            raise ConfigError(str(err))
        return cls(config, initial=args.get("initial"))
