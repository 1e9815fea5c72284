""" Shared inputs for the tests """
import os
import numpy as np
import pytest

# Learning experiments take minutes; run them with NETGAMES_SLOW=1
slow = pytest.mark.skipif(os.environ.get("NETGAMES_SLOW") != "1",
                          reason="set NETGAMES_SLOW=1 to run learning experiments")

# Two player chain from the supply chain experiment
TWO_PLAYER_CONFIG = {
    "holding": 0.05,
    "goodwill": 0.1,
    "raw_price": {"type": "constant", "price": 0.5},
    "consumer_demand": {"type": "linear", "intercept": 10, "slope": 2, "noise": 0.05},
}

THREE_PLAYER_LINE = {
    "graph": {"n_players": 3, "edges": [[0, 1], [1, 2]]},
    "lead_time": [1, 2, 1],
    "holding": 0.05,
    "goodwill": 0.1,
}

FIVE_CITIES = {
    "graph": {
        "n_players": 5,
        "edges": [[0, 1], [1, 2], [2, 3], [3, 4], [4, 0], [0, 2]],
        "weights": [[0, 1, 0.3], [1, 2, 0.2], [2, 3, 0.2], [3, 4, 0.2], [4, 0, 0.3],
                    [0, 2, 0.5]],
    },
    "recovery_noise": 0.05,
}

FOUR_OPINIONS = {
    "graph": {"n_players": 4, "edges": [[0, 1], [1, 2], [2, 3]]},
    "topic_dim": 2,
}

# Small and quick training settings
FAST_TRAINING = {
    "episodes": 4,
    "horizon": 5,
    "warmup": 5,
    "batch_size": 8,
    "buffer_capacity": 1000,
    "hidden": [8],
    "eval_episodes": 2,
}


def numerical_gradient(f, x, h=1e-5):
    """ Central differences of a scalar function f at the array x """
    x = np.array(x, dtype=float)
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        orig = x[idx]
        x[idx] = orig + h
        up = f(x)
        x[idx] = orig - h
        down = f(x)
        x[idx] = orig
        grad[idx] = (up - down) / (2 * h)
    return grad


def relative_error(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(a) + np.abs(b), 1e-6)))


def rollout(env, seed, steps=1000):
    """ Observed states and rewards, one row per step, of a run with
    uniformly random actions. The env and the actions draw from two
    streams of the same seed.
    """
    rng = np.random.default_rng(seed)
    actions = np.random.default_rng(seed + 1)
    state = env.reset(rng)
    rows = []
    for _ in range(steps):
        action = [actions.uniform(sp.low, sp.high) for sp in env.specs]
        state, rewards, _ = env.step(state, action, rng)
        observed = [np.atleast_1d(o) for o in env.observed_states(state)]
        rows.append(np.concatenate(observed + [np.asarray(rewards, dtype=float)]))
    return np.array(rows)
