""" The N-player networked stochastic game: the coupling graph, per-player
specs, information structures and return computation shared by all
environments.
"""
from dataclasses import dataclass
from enum import Enum
import numpy as np


class GameGraph(object):
    """ Directed graph of players. An edge (i, j) couples player j to
    player i; in a supply chain it means "i supplies j".

    Neighbors are taken in both directions: j is a neighbor of i if
    (i, j) or (j, i) is an edge.
    """

    def __init__(self, n_players: int, edges=(), edge_weights: dict=None,
                 undirected: bool=False):
        """
        :param n_players: number of players, N
        :param edges: iterable of (i, j) pairs
        :param edge_weights: optional {(i, j): weight}, weights >= 0.
            Missing weights default to 1.
        :param undirected: add the reverse of every edge, with the same weight
        """
        n_players = int(n_players)
        if n_players < 1:
            raise ValueError(f"A game needs at least one player, got {n_players}")
        self.n_players = n_players
        self.undirected = undirected

        weights = {}
        for (i, j), w in (edge_weights or {}).items():
            w = float(w)
            if w < 0 or not np.isfinite(w):
                raise ValueError(f"Invalid weight {w} on edge ({i}, {j})")
            weights[(int(i), int(j))] = w

        edge_set = set()
        for edge in edges:
            i, j = (int(x) for x in edge)
            self._check_edge(i, j)
            edge_set.add((i, j))

        if undirected:
            for (i, j) in list(edge_set):
                if (j, i) in weights and (i, j) in weights \
                   and weights[(j, i)] != weights[(i, j)]:
                    raise ValueError(f"Asymmetric weights on undirected edge ({i}, {j})")
                w = weights.get((i, j), weights.get((j, i)))
                edge_set.add((j, i))
                if w is not None:
                    weights[(i, j)] = weights[(j, i)] = w

        for (i, j) in weights:
            if (i, j) not in edge_set:
                raise ValueError(f"Weight given for missing edge ({i}, {j})")

        self.edges = frozenset(edge_set)
        self.edge_weights = weights

    def _check_edge(self, i, j):
        if i == j:
            raise ValueError(f"Self loops are not allowed: ({i}, {j})")
        for x in (i, j):
            if not 0 <= x < self.n_players:
                raise ValueError(f"Edge endpoint {x} outside [0, {self.n_players})")

    def _check_player(self, i):
        if not 0 <= i < self.n_players:
            raise IndexError(f"Player {i} outside [0, {self.n_players})")

    def neighbors(self, i: int):
        """ N_i, in ascending order """
        self._check_player(i)
        return sorted({j for (a, j) in self.edges if a == i}
                      | {a for (a, j) in self.edges if j == i})

    def suppliers(self, i: int):
        """ S(i): players with an edge into i, in ascending order """
        self._check_player(i)
        return sorted(a for (a, j) in self.edges if j == i)

    def retailers(self, i: int):
        """ R(i): players i has an edge to, in ascending order """
        self._check_player(i)
        return sorted(j for (a, j) in self.edges if a == i)

    def weight(self, i: int, j: int):
        """ Weight of the edge between i and j (either direction), 0 if none """
        if (i, j) in self.edges:
            return self.edge_weights.get((i, j), 1.0)
        if (j, i) in self.edges:
            return self.edge_weights.get((j, i), 1.0)
        return 0.0

    def topological_order(self):
        """ Players ordered upstream to downstream. Raises on cycles. """
        indegree = {i: len(self.suppliers(i)) for i in range(self.n_players)}
        ready = sorted(i for i, d in indegree.items() if d == 0)
        order = []
        while ready:
            i = ready.pop(0)
            order.append(i)
            for j in self.retailers(i):
                indegree[j] -= 1
                if indegree[j] == 0:
                    ready.append(j)
                    ready.sort()
        if len(order) != self.n_players:
            raise ValueError("The graph has a cycle")
        return order

    @classmethod
    def init_from(cls, args: dict):
        """Create a graph from a Python object, e.g. a parsed config.

        `edges` is a list of [i, j] pairs, `weights` an optional list of
        [i, j, weight] triples.
        """
        if "n_players" not in args:
            raise ValueError("The graph settings must include 'n_players'")
        weights = {(int(i), int(j)): w for (i, j, w) in args.get("weights", [])}
        return cls(args["n_players"],
                   edges=[tuple(e) for e in args.get("edges", [])],
                   edge_weights=weights,
                   undirected=bool(args.get("undirected", False)))

    def __repr__(self):
        return "<{cls}: {n} players, {e} edges>".format(
            cls=type(self).__name__, n=self.n_players, e=len(self.edges))


@dataclass(frozen=True)
class PlayerSpec:
    """ Dimensions, action bounds and discount of one player's MDP """
    state_dim: int
    action_dim: int
    action_low: tuple
    action_high: tuple
    gamma: float = 0.95

    def __post_init__(self):
        if self.state_dim < 1 or self.action_dim < 1:
            raise ValueError("State and action dimensions must be positive")
        if len(self.action_low) != self.action_dim or len(self.action_high) != self.action_dim:
            raise ValueError("Action bounds must have length action_dim")
        if np.any(np.asarray(self.action_low) > np.asarray(self.action_high)):
            raise ValueError("action_low must not exceed action_high")
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must be in (0, 1), got {self.gamma}")

    @property
    def low(self):
        return np.asarray(self.action_low, dtype=float)

    @property
    def high(self):
        return np.asarray(self.action_high, dtype=float)

    def clip(self, action):
        return np.clip(np.asarray(action, dtype=float), self.low, self.high)


class InfoStructure(str, Enum):
    """ What each player may observe of the joint state and action """
    PRIVATE = "private"  # private states and actions
    PUBLIC_STATE = "public_state"  # public states, private actions
    PUBLIC = "public"  # public states and actions


ROLES = ["actor", "critic"]


def as_joint(vectors, dims, name="state"):
    """ Check a joint state or action: one finite vector per player, each
    with the expected length. Returns a list of float arrays.
    """
    if len(vectors) != len(dims):
        raise ValueError(f"Joint {name} has {len(vectors)} entries, expected {len(dims)}")
    out = []
    for i, (v, d) in enumerate(zip(vectors, dims)):
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if v.shape != (d,):
            raise ValueError(f"Player {i} {name} has shape {v.shape}, expected ({d},)")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"Player {i} {name} has non-finite entries")
        out.append(v)
    return out


def neighbor_state_actions(graph: GameGraph, i: int, s, a):
    """ d_i: the (state, action) pairs of player i's neighbors, ascending j """
    if not 0 <= i < graph.n_players:
        raise IndexError(f"Player {i} outside [0, {graph.n_players})")
    return [(s[j], a[j]) for j in graph.neighbors(i)]


def build_observation(info: InfoStructure, role: str, i: int, s, a=None):
    """ The input vector of player i's actor or critic.

    Actors only ever see states, so execution stays decentralized on
    actions under every structure. Concatenation follows ascending player
    index.

    :param info: an InfoStructure (or its value)
    :param role: "actor" or "critic"
    :param s: per-player observed state vectors
    :param a: per-player action vectors, required for critics
    """
    info = InfoStructure(info)
    if role not in ROLES:
        raise ValueError(f"Unknown role '{role}'. Valid roles: {ROLES}")
    if not 0 <= i < len(s):
        raise IndexError(f"Player {i} outside [0, {len(s)})")

    if info == InfoStructure.PRIVATE:
        states = np.atleast_1d(np.asarray(s[i], dtype=float))
    else:
        states = np.concatenate([np.atleast_1d(np.asarray(x, dtype=float)) for x in s])
    if role == "actor":
        return states

    if a is None or len(a) != len(s):
        raise ValueError("A critic observation needs one action per player")
    if info == InfoStructure.PUBLIC:
        actions = np.concatenate([np.atleast_1d(np.asarray(x, dtype=float)) for x in a])
    else:
        actions = np.atleast_1d(np.asarray(a[i], dtype=float))
    return np.concatenate([states, actions])


def observation_dims(info: InfoStructure, i: int, specs):
    """ (actor input length, critic input length) for player i """
    info = InfoStructure(info)
    if info == InfoStructure.PRIVATE:
        actor = specs[i].state_dim
    else:
        actor = sum(sp.state_dim for sp in specs)
    if info == InfoStructure.PUBLIC:
        critic_actions = sum(sp.action_dim for sp in specs)
    else:
        critic_actions = specs[i].action_dim
    return actor, actor + critic_actions


def critic_action_slice(info: InfoStructure, i: int, specs):
    """ Where player i's own action sits inside the action part of its
    critic observation.
    """
    info = InfoStructure(info)
    if info == InfoStructure.PUBLIC:
        start = sum(sp.action_dim for sp in specs[:i])
    else:
        start = 0
    return slice(start, start + specs[i].action_dim)


def discounted_return(rewards, gamma: float):
    """ Σ_t γ^t r_t over a truncated horizon """
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    rewards = np.asarray(rewards, dtype=float)
    discounts = gamma ** np.arange(len(rewards))
    return float(np.sum(discounts * rewards))
