"""
Epidemic spread between connected cities. Each city picks a lockdown
level and a medical effort; lockdowns in neighboring cities also slow the
local spread, weighted by how connected the cities are.
"""
from dataclasses import dataclass
import numpy as np

from .environment import Environment
from .game import GameGraph, PlayerSpec
from .lib.utils import ConfigError, NumericalFault, per_player, require


@dataclass
class CityState:
    """ Healthy individuals and patients of one city """
    healthy: float
    patients: float

    def as_vector(self):
        return np.array([self.healthy, self.patients])


@dataclass
class EpidemicConfig:
    """ Undirected city graph whose edge weights are the connectivities α_ij """
    graph: GameGraph
    recovery_noise: list
    lockdown_cost: list
    effort_cost: list
    reward_timing: str = "post"
    gamma: float = 0.95

    def __post_init__(self):
        n = self.graph.n_players
        self.recovery_noise = [float(x) for x in
                               per_player(self.recovery_noise, n, "recovery_noise")]
        self.lockdown_cost = [float(x) for x in
                              per_player(self.lockdown_cost, n, "lockdown_cost")]
        self.effort_cost = [float(x) for x in per_player(self.effort_cost, n, "effort_cost")]
        if any(w > 1 for w in self.graph.edge_weights.values()):
            raise ValueError("Connectivities must be in [0, 1]")
        if any(x < 0 for x in self.recovery_noise):
            raise ValueError("Recovery noise must be nonnegative")
        if any(x <= 0 for x in self.lockdown_cost + self.effort_cost):
            raise ValueError("Lockdown and effort costs must be positive")
        allowed = ["post", "pre"]
        if self.reward_timing not in allowed:
            raise ValueError(f"reward_timing must be one of {allowed}")

    def spread_factor(self, i, lockdown):
        """ κ_i = exp(-ℓ_i - Σ_j α_ij ℓ_j), the share of healthy infected """
        exposure = lockdown[i] + sum(self.graph.weight(i, j) * lockdown[j]
                                     for j in self.graph.neighbors(i))
        return float(np.exp(-exposure))


def reward_epidemic(healthy: float, lockdown: float, effort: float,
                    lockdown_cost: float, effort_cost: float):
    """ R_i = h_i² - Q_ii ℓ_i² - P_ii ν_i² """
    return healthy ** 2 - lockdown_cost * lockdown ** 2 - effort_cost * effort ** 2


def step_epidemic(config: EpidemicConfig, states: list, actions: list,
                  rng: np.random.Generator):
    """ Advance every city one step.

    :param actions: per city (lockdown ℓ_i, effort ν_i), clipped to [0, 1]
    :returns: (next states, rewards, info)
    """
    n = config.graph.n_players
    if len(states) != n or len(actions) != n:
        raise ValueError(f"Expected {n} states and actions")
    for i, s in enumerate(states):
        if not (np.isfinite(s.healthy) and np.isfinite(s.patients)):
            raise NumericalFault("Non-finite population", player=i, field="state")
        if s.healthy < 0 or s.patients < 0:
            raise ValueError(f"City {i} has a negative population")
    actions = np.clip(np.asarray(actions, dtype=float).reshape(n, 2), 0.0, 1.0)
    if not np.all(np.isfinite(actions)):
        raise NumericalFault("Non-finite action", field="action")
    lockdown, effort = actions[:, 0], actions[:, 1]

    # One recovery draw per city, ascending
    recovery = np.clip(rng.normal(effort, config.recovery_noise), 0.0, 1.0)

    next_states, rewards, infected = [], np.zeros(n), np.zeros(n)
    for i, s in enumerate(states):
        kappa = config.spread_factor(i, lockdown)
        infected[i] = kappa * s.healthy
        nxt = CityState(healthy=(1 - kappa) * s.healthy + recovery[i] * s.patients,
                        patients=(1 - recovery[i]) * s.patients + infected[i])
        next_states.append(nxt)
        healthy = nxt.healthy if config.reward_timing == "post" else s.healthy
        rewards[i] = reward_epidemic(healthy, lockdown[i], effort[i],
                                     config.lockdown_cost[i], config.effort_cost[i])

    info = {
        "recovery": recovery,
        "infected": infected,
        "actions": actions,
        "healthy": np.array([s.healthy for s in next_states]),
        "patients": np.array([s.patients for s in next_states]),
    }
    return next_states, rewards, info


class Epidemic(Environment):
    """ Cities choosing lockdowns and medical effort.

    State vectors [h, p], action vectors [ℓ, ν] in [0, 1]².
    """

    trajectory_columns = ["t", "city", "h", "p", "lockdown", "effort", "reward"]
    metric_names = ["final_healthy", "mean_patients"]

    def __init__(self, config: EpidemicConfig, initial: dict=None):
        self.config = config
        specs = [PlayerSpec(state_dim=2, action_dim=2, action_low=(0.0, 0.0),
                            action_high=(1.0, 1.0), gamma=config.gamma)
                 for _ in range(config.graph.n_players)]
        super(Epidemic, self).__init__(config.graph, specs)
        self.initial = dict(initial or {})

    def reset(self, rng, **initial):
        """
        :param healthy: initial healthy population, scalar or per city
        :param patients: initial patients, scalar or per city
        """
        kwargs = {"healthy": 0.99, "patients": 0.01}
        kwargs.update(self.initial)
        kwargs.update(initial)
        n = self.n_players
        healthy = per_player(kwargs["healthy"], n, "healthy")
        patients = per_player(kwargs["patients"], n, "patients")
        return [CityState(float(h), float(p)) for h, p in zip(healthy, patients)]

    def step(self, state, action, rng):
        return step_epidemic(self.config, state, action, rng)

    def observed_states(self, state):
        return [s.as_vector() for s in state]

    def action_labels(self, i):
        return ["lockdown", "effort"]

    def episode_metrics(self, infos):
        if not infos:
            return {"final_healthy": 0.0, "mean_patients": 0.0}
        return {
            "final_healthy": float(np.sum(infos[-1]["healthy"])),
            "mean_patients": float(np.mean([np.sum(info["patients"]) for info in infos])),
        }

    def trajectory_rows(self, t, state, action, rewards, info):
        return [{
            "t": t,
            "city": i,
            "h": float(state[i].healthy),
            "p": float(state[i].patients),
            "lockdown": float(info["actions"][i, 0]),
            "effort": float(info["actions"][i, 1]),
            "reward": float(rewards[i]),
        } for i in range(self.n_players)]

    @classmethod
    def init_from(cls, args: dict):
        graph = require(args, "graph")
        if not isinstance(graph, GameGraph):
            graph = GameGraph.init_from(dict(graph, undirected=graph.get("undirected", True)))
        try:
            config = EpidemicConfig(
                graph=graph,
                recovery_noise=args.get("recovery_noise", 0.05),
                lockdown_cost=args.get("lockdown_cost", 0.5),
                effort_cost=args.get("effort_cost", 0.5),
                reward_timing=args.get("reward_timing", "post"),
                gamma=args.get("gamma", 0.95),
            )
        except ValueError as err:
            raise ConfigError(str(err))
        return cls(config, initial=args.get("initial"))
