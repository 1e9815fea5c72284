""" Stochastic policy actor-critic, the baseline learner.

The actor is a Gaussian policy whose mean is a network of the
observation. It ascends the likelihood ratio gradient
E[∇ log π(a|s) (Q(s, a) - Q(s, μ(s)))], and the critic takes a TD step
towards r + γ Q(s⁺, a⁺) using the action actually taken at s⁺.
"""
import numpy as np

from .lib.network import DenseNet, AdamState, adam_step
from .lib.replay import Batch
from .lib.utils import NumericalFault


class GaussianPolicy(object):
    """ π(a|s) = Normal(μ(s), diag(σ²)), actions clipped to the bounds """

    def __init__(self, mean: DenseNet, sigma, action_low, action_high):
        self.mean = mean
        self.action_low = np.asarray(action_low, dtype=float)
        self.action_high = np.asarray(action_high, dtype=float)
        self.sigma = np.broadcast_to(np.asarray(sigma, dtype=float),
                                     self.action_low.shape).copy()
        if np.any(self.sigma <= 0):
            raise ValueError("The policy std must be positive")

    @classmethod
    def build(cls, obs_dim, action_low, action_high, rng, sigma=0.1, hidden=(32,),
              hidden_activation="tanh"):
        mean = DenseNet.initialize([obs_dim, *hidden, len(action_low)], rng,
                                   hidden_activation=hidden_activation,
                                   output_activation="scaled_tanh",
                                   output_low=action_low, output_high=action_high)
        return cls(mean, sigma, action_low, action_high)

    def sample(self, obs, rng: np.random.Generator):
        mu = self.mean.forward(obs)
        return np.clip(mu + self.sigma * rng.standard_normal(mu.shape),
                       self.action_low, self.action_high)

    def score(self, obs, actions):
        """ ∂ log π(a|s) / ∂ μ(s), per row """
        return (np.atleast_2d(actions) - self.mean.forward(np.atleast_2d(obs))) / self.sigma ** 2


class ActorCritic(object):
    """ Gaussian policy plus a Q critic, updated on-policy """

    def __init__(self, policy: GaussianPolicy, critic: DenseNet, lr_actor: float=1e-2,
                 lr_critic: float=1e-2, gamma: float=0.95):
        if not 0 <= gamma < 1:
            raise ValueError(f"gamma must be in [0, 1), got {gamma}")
        self.policy = policy
        self.critic = critic
        self.gamma = gamma
        self.actor_opt = AdamState.for_params(policy.mean.params, lr=lr_actor)
        self.critic_opt = AdamState.for_params(critic.params, lr=lr_critic)

    @classmethod
    def build(cls, obs_dim, action_low, action_high, rng, sigma=0.1, hidden=(32,), **kwargs):
        policy = GaussianPolicy.build(obs_dim, action_low, action_high, rng, sigma=sigma,
                                      hidden=hidden)
        critic = DenseNet.initialize([obs_dim + len(action_low), *hidden, 1], rng,
                                     hidden_activation="tanh")
        return cls(policy, critic, **kwargs)

    @property
    def action_low(self):
        return self.policy.action_low

    @property
    def action_high(self):
        return self.policy.action_high

    def select_action(self, obs, explore: bool, rng: np.random.Generator):
        """ A draw from π(·|obs) when exploring, the mean μ(obs) otherwise """
        if explore:
            action = self.policy.sample(obs, rng)
        else:
            action = np.clip(self.policy.mean.forward(obs), self.action_low, self.action_high)
        if not np.all(np.isfinite(action)):
            raise NumericalFault("Non-finite action", field="action")
        return action

    def q(self, obs, actions):
        return self.critic.forward(np.concatenate([np.atleast_2d(obs),
                                                   np.atleast_2d(actions)], axis=1))[:, 0]

    def advantage(self, batch: Batch):
        """ Q(s, a) - Q(s, μ(s)) """
        greedy = self.policy.mean.forward(batch.obs)
        return self.q(batch.obs, batch.action) - self.q(batch.obs, greedy)

    def update_policy(self, batch: Batch):
        """ Likelihood ratio ascent step. Returns the mean advantage. """
        adv = self.advantage(batch)
        if not np.all(np.isfinite(adv)):
            raise NumericalFault("Non-finite advantage", field="advantage")
        if not np.any(adv):
            return 0.0
        upstream = adv[:, None] * self.policy.score(batch.obs, batch.action) / len(batch)
        grads, _ = self.policy.mean.backward(batch.obs, upstream)
        adam_step(self.policy.mean.params, [-g for g in grads], self.actor_opt)
        return float(np.mean(adv))

    def update_critic(self, batch: Batch):
        """ TD step towards r + γ Q(s⁺, a⁺). Returns the loss before the step. """
        targets = batch.reward.astype(float)
        if self.gamma > 0:
            if batch.next_action is None:
                raise ValueError("On-policy critic updates need the next actions")
            q_next = self.q(batch.next_obs, batch.next_action)
            targets = targets + self.gamma * np.where(batch.terminal, 0.0, q_next)
        X = np.concatenate([batch.obs, batch.action], axis=1)
        err = self.critic.forward(X)[:, 0] - targets
        loss = float(np.mean(err ** 2))
        if not np.isfinite(loss):
            raise NumericalFault("Non-finite critic loss", field="critic_loss")
        grads, _ = self.critic.backward(X, (2 * err / len(err))[:, None])
        adam_step(self.critic.params, grads, self.critic_opt)
        return loss

    def to_arrays(self, prefix=""):
        """ Nets, policy std, optimizer states and gamma, keyed for np.savez """
        arrays = {
            prefix + "bounds": np.stack([self.action_low, self.action_high]),
            prefix + "sigma": self.policy.sigma,
            prefix + "gamma": np.array(self.gamma),
        }
        arrays.update(self.policy.mean.to_arrays(prefix + "mean."))
        arrays.update(self.critic.to_arrays(prefix + "critic."))
        arrays.update(self.actor_opt.to_arrays(prefix + "actor_opt."))
        arrays.update(self.critic_opt.to_arrays(prefix + "critic_opt."))
        return arrays

    @classmethod
    def from_arrays(cls, arrays, prefix=""):
        low, high = arrays[prefix + "bounds"]
        policy = GaussianPolicy(DenseNet.from_arrays(arrays, prefix + "mean."),
                                arrays[prefix + "sigma"], low, high)
        learner = cls(policy, DenseNet.from_arrays(arrays, prefix + "critic."),
                      gamma=float(arrays[prefix + "gamma"]))
        learner.actor_opt = AdamState.from_arrays(arrays, prefix + "actor_opt.")
        learner.critic_opt = AdamState.from_arrays(arrays, prefix + "critic_opt.")
        return learner

    def __repr__(self):
        return "<{cls}: obs {o}, action {a}>".format(
            cls=type(self).__name__, o=self.policy.mean.layer_dims[0], a=len(self.action_low))


def generic_ac_update(learner: ActorCritic, batch: Batch):
    """ One actor step, then one critic step, on a batch of on-policy data.

    :returns: (mean advantage, critic loss), both before the updates
    """
    advantage = learner.update_policy(batch)
    loss = learner.update_critic(batch)
    return advantage, loss
