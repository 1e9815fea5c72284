""" Experience replay for the off-policy learners """
from collections import deque
from dataclasses import dataclass
import numpy as np

from .utils import check_finite


@dataclass
class Transition:
    """ One (s, a, r, s⁺) tuple as seen by one learner.

    `joint_action` is the action part of the critic input when it differs
    from `action` (public actions). `next_action` is the action actually
    taken at s⁺, used by on-policy critics.
    """
    obs: np.ndarray
    action: np.ndarray
    reward: float
    next_obs: np.ndarray
    terminal: bool = False
    joint_action: np.ndarray = None
    next_action: np.ndarray = None

    def __post_init__(self):
        self.obs = check_finite(np.atleast_1d(self.obs), "obs")
        self.next_obs = check_finite(np.atleast_1d(self.next_obs), "next_obs")
        self.action = check_finite(np.atleast_1d(self.action), "action")
        self.reward = float(check_finite(self.reward, "reward"))
        if self.obs.shape != self.next_obs.shape:
            raise ValueError(f"obs {self.obs.shape} and next_obs {self.next_obs.shape} differ")
        if self.joint_action is not None:
            self.joint_action = check_finite(np.atleast_1d(self.joint_action), "joint_action")
        if self.next_action is not None:
            self.next_action = check_finite(np.atleast_1d(self.next_action), "next_action")

    @property
    def critic_action(self):
        return self.action if self.joint_action is None else self.joint_action


@dataclass
class Batch:
    """ Transitions stacked into arrays, one row per transition """
    obs: np.ndarray
    action: np.ndarray
    reward: np.ndarray
    next_obs: np.ndarray
    terminal: np.ndarray
    critic_action: np.ndarray
    next_action: np.ndarray = None

    @classmethod
    def stack(cls, transitions):
        if not transitions:
            raise ValueError("Can not stack an empty batch")
        next_action = None
        if all(tr.next_action is not None for tr in transitions):
            next_action = np.stack([tr.next_action for tr in transitions])
        return cls(obs=np.stack([tr.obs for tr in transitions]),
                   action=np.stack([tr.action for tr in transitions]),
                   reward=np.array([tr.reward for tr in transitions]),
                   next_obs=np.stack([tr.next_obs for tr in transitions]),
                   terminal=np.array([tr.terminal for tr in transitions], dtype=bool),
                   critic_action=np.stack([tr.critic_action for tr in transitions]),
                   next_action=next_action)

    def __len__(self):
        return len(self.reward)


class ReplayBuffer(object):
    """ Bounded FIFO of transitions, sampled uniformly with replacement
    from its own rng stream.
    """

    def __init__(self, capacity: int, rng: np.random.Generator):
        capacity = int(capacity)
        if capacity < 1:
            raise ValueError(f"Capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.rng = rng
        self._items = deque(maxlen=capacity)

    def push(self, transition: Transition):
        # deque with maxlen drops the oldest item
        self._items.append(transition)

    def sample(self, batch_size: int):
        """ A Batch of `batch_size` transitions """
        if not self._items:
            raise ValueError("Can not sample from an empty buffer")
        if batch_size < 1:
            raise ValueError(f"Batch size must be positive, got {batch_size}")
        idx = self.rng.integers(0, len(self._items), size=batch_size)
        return Batch.stack([self._items[k] for k in idx])

    def __len__(self):
        return len(self._items)

    def __iter__(self):
        return iter(self._items)

    def __getitem__(self, k):
        return self._items[k]

    def __repr__(self):
        return "<{cls}: {n}/{cap}>".format(cls=type(self).__name__, n=len(self),
                                           cap=self.capacity)
