""" Multi-agent training paradigms. A paradigm decides what each critic may
see during training; actors only ever see states, so execution stays
decentralized under every paradigm except the centralized baseline.
"""
from enum import Enum
import numpy as np

from .actorcritic import ActorCritic
from .ddpg import DDPGAgent, HIDDEN
from .game import InfoStructure, observation_dims, critic_action_slice

LEARNERS = ["ddpg", "actor_critic"]


class Paradigm(str, Enum):
    INDIVIDUAL = "individual"
    CLDE_STATE = "clde_state"
    CLDE_FULL = "clde_full"
    CENTRALIZED = "centralized"

    @property
    def info_structure(self):
        return {
            Paradigm.INDIVIDUAL: InfoStructure.PRIVATE,
            Paradigm.CLDE_STATE: InfoStructure.PUBLIC_STATE,
            Paradigm.CLDE_FULL: InfoStructure.PUBLIC,
            Paradigm.CENTRALIZED: InfoStructure.PUBLIC,
        }[self]

    @property
    def centralized(self):
        return self == Paradigm.CENTRALIZED


def make_agents(paradigm, env, rng: np.random.Generator, hidden=HIDDEN, learner="ddpg",
                **kwargs):
    """ One agent per player, or a single agent over the joint state and
    joint action for the centralized baseline.

    :param learner: "ddpg" or "actor_critic"
    :param kwargs: passed on to the agent class (learning rates, tau, sigma, ...)
    """
    paradigm = Paradigm(paradigm)
    if learner == "actor_critic":
        return _actor_critics(paradigm, env, rng, hidden, **kwargs)
    if learner != "ddpg":
        raise ValueError(f"Unknown learner '{learner}'. Valid learners: {LEARNERS}")
    specs = env.specs
    if paradigm.centralized:
        low = np.concatenate([sp.low for sp in specs])
        high = np.concatenate([sp.high for sp in specs])
        obs_dim = sum(sp.state_dim for sp in specs)
        return [DDPGAgent.build(obs_dim, low, high, critic_action_dim=len(low), rng=rng,
                                hidden=hidden, gamma=specs[0].gamma, **kwargs)]

    info = paradigm.info_structure
    agents = []
    for i, sp in enumerate(specs):
        actor_dim, critic_dim = observation_dims(info, i, specs)
        agents.append(DDPGAgent.build(actor_dim, sp.low, sp.high,
                                      critic_action_dim=critic_dim - actor_dim, rng=rng,
                                      hidden=hidden, gamma=sp.gamma,
                                      action_slice=critic_action_slice(info, i, specs),
                                      **kwargs))
    return agents


def _actor_critics(paradigm, env, rng, hidden, sigma: float=0.1, **kwargs):
    """ Gaussian policy learners. Their critic sees the actor observation
    and the learner's own action, so there is no public actions variant.

    :param sigma: policy std as a fraction of each action's width
    """
    if paradigm == Paradigm.CLDE_FULL:
        raise ValueError("The actor_critic learner does not support clde_full")
    specs = env.specs
    if paradigm.centralized:
        low = np.concatenate([sp.low for sp in specs])
        high = np.concatenate([sp.high for sp in specs])
        obs_dim = sum(sp.state_dim for sp in specs)
        return [ActorCritic.build(obs_dim, low, high, rng, sigma=sigma * (high - low),
                                  hidden=hidden, gamma=specs[0].gamma, **kwargs)]
    info = paradigm.info_structure
    return [ActorCritic.build(observation_dims(info, i, specs)[0], sp.low, sp.high, rng,
                              sigma=sigma * (sp.high - sp.low), hidden=hidden, gamma=sp.gamma,
                              **kwargs)
            for i, sp in enumerate(specs)]
