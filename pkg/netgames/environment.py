""" Base class for networked game environments.
Environments are stepped by the trainers in training.py, and can export
their trajectories as CSV through a Storage.
"""
import logging
import numpy as np

from .game import GameGraph, as_joint
from .lib.datalist import RecordList
from .lib.utils import check_finite
from .storage import Storage, LocalStorage

logger = logging.getLogger(__name__)


class Environment(object):
    """ An N-player networked stochastic game.

    Subclasses set `graph` and `specs` and implement reset() and step().
    step() must be a pure function of (state, action, rng draws): the same
    rng stream gives identical outputs.
    """

    # Column names of the trajectory CSV, set by subclasses
    trajectory_columns = ["t", "player", "reward"]
    # Per-episode metrics reported by episode_metrics()
    metric_names = []

    def __init__(self, graph: GameGraph, specs: list):
        """
        :param graph: the coupling graph
        :param specs: one PlayerSpec per player
        """
        if len(specs) != graph.n_players:
            raise ValueError(f"Got {len(specs)} player specs for {graph.n_players} players")
        self.graph = graph
        self.specs = list(specs)

    @property
    def n_players(self):
        return self.graph.n_players

    @property
    def state_dims(self):
        return [sp.state_dim for sp in self.specs]

    @property
    def action_dims(self):
        return [sp.action_dim for sp in self.specs]

    def reset(self, rng: np.random.Generator, **initial):
        """ Draw an initial joint state from ρ """
        raise NotImplementedError("The reset method must be overwritten.")

    def step(self, state, action, rng: np.random.Generator):
        """ Returns (next state, rewards, info) """
        raise NotImplementedError("The step method must be overwritten.")

    def observed_states(self, state):
        """ What each player can observe of its own state, as vectors.
        By default the full internal state.
        """
        return [np.asarray(s, dtype=float) for s in state]

    def clip_actions(self, action):
        """ Check shapes and clip every player's action to its bounds """
        action = as_joint(action, self.action_dims, name="action")
        return [sp.clip(a) for sp, a in zip(self.specs, action)]

    def action_labels(self, i: int):
        """ Short names of player i's action components """
        return [f"a{k}" for k in range(self.specs[i].action_dim)]

    def episode_metrics(self, infos: list):
        """ Metrics over one episode, given the info dicts of its steps """
        return {}

    def trajectory_rows(self, t: int, state, action, rewards, info):
        """ One CSV row per player for step t """
        return [{"t": t, "player": i, "reward": float(rewards[i])}
                for i in range(self.n_players)]

    def check_rewards(self, rewards):
        """ One finite reward per player, as an array """
        rewards = check_finite(rewards, "reward")
        if rewards.shape != (self.n_players,):
            raise ValueError(f"Expected {self.n_players} rewards, got {rewards.shape}")
        return rewards

    def simulate(self, policy, rng: np.random.Generator, horizon: int, state=None, **initial):
        """ Roll out `policy(t, observed_states) -> joint action` for
        `horizon` steps.

        :returns: (RecordList of trajectory rows, list of per-step info dicts,
                   per-player reward sums)
        """
        if state is None:
            state = self.reset(rng, **initial)
        rows = RecordList(columns=self.trajectory_columns)
        infos = []
        totals = np.zeros(self.n_players)
        for t in range(horizon):
            action = policy(t, self.observed_states(state))
            next_state, rewards, info = self.step(state, action, rng)
            rewards = self.check_rewards(rewards)
            for row in self.trajectory_rows(t, state, action, rewards, info):
                rows.append(row)
            infos.append(info)
            totals += rewards
            state = next_state
        return rows, infos, totals

    def export_trajectory(self, rows: RecordList, key: str, storage: Storage=None):
        """ Write trajectory rows as CSV """
        if storage is None:
            storage = LocalStorage()
        storage.save(key, rows.as_csv, "csv")
        logger.debug("Exported %d trajectory rows to %s", len(rows), key)

    @classmethod
    def init_from(cls, args: dict):
        """Create an environment from a Python object, e.g. a parsed config."""
        raise NotImplementedError(f"{cls.__name__} can not be created from a config")

    def __repr__(self):
        # Use type(self).__name__ to get the right class name for sub classes
        return "<{cls}: {n} players>".format(cls=type(self).__name__, n=self.n_players)
