""" Deep deterministic policy gradient: a deterministic actor, a Q critic,
target copies of both, and Adam optimizers. One agent learns for one
player, or for the whole chain under a centralized reward.
"""
import numpy as np

from .lib.network import DenseNet, AdamState, adam_step, soft_update
from .lib.replay import Batch
from .lib.utils import NumericalFault

HIDDEN = (64, 64)
LR_ACTOR = 1e-4
LR_CRITIC = 1e-3
TAU = 0.01
GAMMA = 0.95
SIGMA_START = 0.1
SIGMA_END = 0.01


def exploration_sigma(episode: int, episodes: int, low, high,
                      start: float=SIGMA_START, end: float=SIGMA_END):
    """ Exploration noise scale, decayed linearly from start·(high - low)
    at the first episode to end·(high - low) at the last.
    """
    width = np.asarray(high, dtype=float) - np.asarray(low, dtype=float)
    frac = 0.0 if episodes <= 1 else min(max(episode / (episodes - 1), 0.0), 1.0)
    return ((1 - frac) * start + frac * end) * width


class DDPGAgent(object):
    """ Actor μ(s), critic Q(s, a) and their target networks.

    The critic input is the actor observation followed by the critic's
    action part. That action part is the agent's own action, or the joint
    action of all players when actions are public; `action_slice` locates
    the agent's own action inside it.
    """

    def __init__(self, actor: DenseNet, critic: DenseNet, action_low, action_high,
                 action_slice: slice=None, lr_actor: float=LR_ACTOR,
                 lr_critic: float=LR_CRITIC, tau: float=TAU, gamma: float=GAMMA,
                 exploration_sigma=0.0):
        """
        :param actor: net from observation to action
        :param critic: net from [observation, critic action] to a scalar
        :param action_low, action_high: action bounds
        :param action_slice: the agent's own action within the critic action
        :param exploration_sigma: std of the Gaussian exploration noise,
            scalar or per action component
        """
        self.action_low = np.asarray(action_low, dtype=float)
        self.action_high = np.asarray(action_high, dtype=float)
        self.action_dim = len(self.action_low)
        if actor.layer_dims[-1] != self.action_dim:
            raise ValueError(f"Actor outputs {actor.layer_dims[-1]} values, "
                             f"expected {self.action_dim}")
        if critic.layer_dims[-1] != 1:
            raise ValueError("The critic must output a scalar")
        self.obs_dim = actor.layer_dims[0]
        self.critic_action_dim = critic.layer_dims[0] - self.obs_dim
        if self.critic_action_dim < self.action_dim:
            raise ValueError("The critic input is too short for observation and action")
        if action_slice is None:
            action_slice = slice(0, self.action_dim)
        if action_slice.stop - action_slice.start != self.action_dim \
           or action_slice.stop > self.critic_action_dim:
            raise ValueError(f"Invalid action slice {action_slice}")
        if not 0 <= gamma < 1:
            raise ValueError(f"gamma must be in [0, 1), got {gamma}")

        self.actor = actor
        self.critic = critic
        self.target_actor = actor.copy()
        self.target_critic = critic.copy()
        self.actor_opt = AdamState.for_params(actor.params, lr=lr_actor)
        self.critic_opt = AdamState.for_params(critic.params, lr=lr_critic)
        self.action_slice = action_slice
        self.tau = tau
        self.gamma = gamma
        self.exploration_sigma = exploration_sigma

    @classmethod
    def build(cls, obs_dim: int, action_low, action_high, critic_action_dim: int,
              rng: np.random.Generator, hidden=HIDDEN, hidden_activation: str="relu",
              **kwargs):
        """ New agent with freshly initialized nets. The actor output is
        squashed into the action bounds, the critic output is linear.
        """
        action_dim = len(action_low)
        actor = DenseNet.initialize([obs_dim, *hidden, action_dim], rng,
                                    hidden_activation=hidden_activation,
                                    output_activation="scaled_tanh",
                                    output_low=action_low, output_high=action_high)
        critic = DenseNet.initialize([obs_dim + critic_action_dim, *hidden, 1], rng,
                                     hidden_activation=hidden_activation)
        return cls(actor, critic, action_low, action_high, **kwargs)

    @property
    def exploration_sigma(self):
        return self._sigma

    @exploration_sigma.setter
    def exploration_sigma(self, value):
        sigma = np.broadcast_to(np.asarray(value, dtype=float), (self.action_dim,)).copy()
        if np.any(sigma < 0):
            raise ValueError("exploration_sigma must be nonnegative")
        self._sigma = sigma

    def select_action(self, obs, explore: bool, rng: np.random.Generator):
        """ μ(obs), plus Gaussian noise when exploring, clipped to the bounds """
        action = self.actor.forward(obs)
        if explore:
            action = action + rng.normal(0.0, self._sigma)
        action = np.clip(action, self.action_low, self.action_high)
        if not np.all(np.isfinite(action)):
            raise NumericalFault("Non-finite action", field="action")
        return action

    def critic_input(self, obs, critic_action):
        return np.concatenate([np.atleast_2d(obs), np.atleast_2d(critic_action)], axis=1)

    def critic_target(self, batch: Batch, next_critic_action=None):
        """ y = r + γ Q'(s⁺, a⁺), with y = r on terminal transitions.

        :param next_critic_action: the critic action part at s⁺. Defaults
            to the target actor's action, which is only complete when the
            critic sees no other player's action.
        """
        if next_critic_action is None:
            if self.critic_action_dim != self.action_dim:
                raise ValueError("Joint action critics need the next joint action")
            next_critic_action = self.target_actor.forward(batch.next_obs)
        q_next = self.target_critic.forward(
            self.critic_input(batch.next_obs, next_critic_action))[:, 0]
        return batch.reward + self.gamma * np.where(batch.terminal, 0.0, q_next)

    def update_critic(self, batch: Batch, targets=None):
        """ One Adam step on mean (Q(s, a) - y)². Returns the loss before the step. """
        if targets is None:
            targets = self.critic_target(batch)
        X = self.critic_input(batch.obs, batch.critic_action)
        q = self.critic.forward(X)[:, 0]
        err = q - targets
        loss = float(np.mean(err ** 2))
        if not np.isfinite(loss):
            raise NumericalFault("Non-finite critic loss", field="critic_loss")
        grads, _ = self.critic.backward(X, (2 * err / len(err))[:, None])
        adam_step(self.critic.params, grads, self.critic_opt)
        return loss

    def actor_objective(self, obs, critic_action):
        """ Mean Q(s, μ(s)), with the agent's own action replaced by μ(s) """
        critic_action = np.array(critic_action, dtype=float)
        critic_action[:, self.action_slice] = self.actor.forward(obs)
        return float(np.mean(self.critic.forward(self.critic_input(obs, critic_action))))

    def actor_gradient(self, batch: Batch):
        """ Mean Q(s, μ(s)) and its gradient with respect to the actor
        parameters: the critic's input gradient at the action, chained
        through the actor.
        """
        n = len(batch)
        actions = self.actor.forward(batch.obs)
        critic_action = np.array(batch.critic_action, dtype=float)
        critic_action[:, self.action_slice] = actions
        X = self.critic_input(batch.obs, critic_action)
        q = self.critic.forward(X)
        objective = float(np.mean(q))
        if not np.isfinite(objective):
            raise NumericalFault("Non-finite actor objective", field="actor_objective")

        _, input_grad = self.critic.backward(X, np.full((n, 1), 1.0 / n))
        start = self.obs_dim + self.action_slice.start
        dq_da = input_grad[:, start:start + self.action_dim]
        grads, _ = self.actor.backward(batch.obs, dq_da)
        return objective, grads

    def update_actor(self, batch: Batch):
        """ One Adam ascent step on mean Q(s, μ(s)). Returns the objective
        before the step.
        """
        objective, grads = self.actor_gradient(batch)
        adam_step(self.actor.params, [-g for g in grads], self.actor_opt)
        return objective

    def soft_update_targets(self):
        soft_update(self.target_actor, self.actor, self.tau)
        soft_update(self.target_critic, self.critic, self.tau)

    def to_arrays(self, prefix=""):
        """ Nets, optimizer states and settings, keyed for np.savez """
        arrays = {
            prefix + "bounds": np.stack([self.action_low, self.action_high]),
            prefix + "slice": np.array([self.action_slice.start, self.action_slice.stop]),
            prefix + "settings": np.array([self.tau, self.gamma]),
            prefix + "sigma": self._sigma,
        }
        for name in ["actor", "critic", "target_actor", "target_critic"]:
            arrays.update(getattr(self, name).to_arrays(f"{prefix}{name}."))
        arrays.update(self.actor_opt.to_arrays(prefix + "actor_opt."))
        arrays.update(self.critic_opt.to_arrays(prefix + "critic_opt."))
        return arrays

    @classmethod
    def from_arrays(cls, arrays, prefix=""):
        low, high = arrays[prefix + "bounds"]
        start, stop = (int(x) for x in arrays[prefix + "slice"])
        tau, gamma = (float(x) for x in arrays[prefix + "settings"])
        agent = cls(DenseNet.from_arrays(arrays, prefix + "actor."),
                    DenseNet.from_arrays(arrays, prefix + "critic."),
                    low, high, action_slice=slice(start, stop), tau=tau, gamma=gamma,
                    exploration_sigma=arrays[prefix + "sigma"])
        agent.target_actor = DenseNet.from_arrays(arrays, prefix + "target_actor.")
        agent.target_critic = DenseNet.from_arrays(arrays, prefix + "target_critic.")
        agent.actor_opt = AdamState.from_arrays(arrays, prefix + "actor_opt.")
        agent.critic_opt = AdamState.from_arrays(arrays, prefix + "critic_opt.")
        return agent

    def __repr__(self):
        return "<{cls}: obs {o}, action {a}, critic action {c}>".format(
            cls=type(self).__name__, o=self.obs_dim, a=self.action_dim,
            c=self.critic_action_dim)
