import numpy as np
import pytest

from netgames import ENVIRONMENTS
from netgames.actorcritic import ActorCritic
from netgames.game import PlayerSpec, build_observation
from netgames.paradigm import Paradigm, make_agents
from .data import TWO_PLAYER_CONFIG, THREE_PLAYER_LINE, FIVE_CITIES, FOUR_OPINIONS

ENV_CONFIGS = {
    "supply_chain": THREE_PLAYER_LINE,
    "supply_chain_2p": TWO_PLAYER_CONFIG,
    "retailer": {},
    "epidemic": FIVE_CITIES,
    "opinion": FOUR_OPINIONS,
}


class SpecsOnly(object):
    """ Just enough of an environment for make_agents """

    def __init__(self, specs):
        self.specs = specs


def _two_players():
    spec = PlayerSpec(state_dim=4, action_dim=2, action_low=(0.0, 0.0),
                      action_high=(20.0, 10.0))
    return SpecsOnly([spec, spec])


def _dims(agent):
    return agent.actor.layer_dims[0], agent.critic.layer_dims[0]


def test_info_structures():
    assert Paradigm.INDIVIDUAL.info_structure == "private"
    assert Paradigm.CLDE_STATE.info_structure == "public_state"
    assert Paradigm.CLDE_FULL.info_structure == "public"
    assert Paradigm.CENTRALIZED.info_structure == "public"
    assert Paradigm.CENTRALIZED.centralized
    assert not Paradigm.CLDE_FULL.centralized
    with pytest.raises(ValueError):
        Paradigm("maddpg")


def test_individual_dims():
    agents = make_agents("individual", _two_players(), np.random.default_rng(0), hidden=(8,))
    assert len(agents) == 2
    assert [_dims(a) for a in agents] == [(4, 6), (4, 6)]


def test_clde_state_dims():
    agents = make_agents(Paradigm.CLDE_STATE, _two_players(), np.random.default_rng(0),
                         hidden=(8,))
    assert [_dims(a) for a in agents] == [(8, 10), (8, 10)]


def test_clde_full_dims():
    agents = make_agents(Paradigm.CLDE_FULL, _two_players(), np.random.default_rng(0),
                         hidden=(8,))
    assert [_dims(a) for a in agents] == [(8, 12), (8, 12)]
    assert agents[0].action_slice == slice(0, 2)
    assert agents[1].action_slice == slice(2, 4)


def test_centralized_dims():
    agents = make_agents(Paradigm.CENTRALIZED, _two_players(), np.random.default_rng(0),
                         hidden=(8,))
    assert len(agents) == 1
    assert _dims(agents[0]) == (8, 12)
    assert np.array_equal(agents[0].action_high, [20.0, 10.0, 20.0, 10.0])


def test_agent_kwargs_pass_through():
    agents = make_agents("individual", _two_players(), np.random.default_rng(0), hidden=(8,),
                         tau=0.5, lr_actor=0.1)
    assert all(a.tau == 0.5 for a in agents)
    assert all(a.actor_opt.lr == 0.1 for a in agents)


def test_actor_critic_learners():
    rng = np.random.default_rng(0)
    agents = make_agents("individual", _two_players(), rng, hidden=(8,), learner="actor_critic",
                         sigma=0.1, lr_actor=0.1)
    assert all(isinstance(a, ActorCritic) for a in agents)
    assert [a.critic.layer_dims[0] for a in agents] == [6, 6]
    assert np.allclose(agents[0].policy.sigma, [2.0, 1.0])
    assert agents[0].actor_opt.lr == 0.1

    state = make_agents("clde_state", _two_players(), rng, hidden=(8,), learner="actor_critic")
    assert [a.policy.mean.layer_dims[0] for a in state] == [8, 8]
    (central,) = make_agents("centralized", _two_players(), rng, hidden=(8,),
                             learner="actor_critic")
    assert central.policy.mean.layer_dims == [8, 8, 4]
    with pytest.raises(ValueError):
        make_agents("clde_full", _two_players(), rng, learner="actor_critic")
    with pytest.raises(ValueError):
        make_agents("individual", _two_players(), rng, learner="ppo")


@pytest.mark.parametrize("env_name", sorted(ENV_CONFIGS))
@pytest.mark.parametrize("paradigm", [p for p in Paradigm if not p.centralized])
def test_dims_match_observations(env_name, paradigm):
    env = ENVIRONMENTS[env_name].init_from(ENV_CONFIGS[env_name])
    rng = np.random.default_rng(1)
    agents = make_agents(paradigm, env, rng, hidden=(4,))
    obs = env.observed_states(env.reset(rng))
    actions = [sp.low for sp in env.specs]
    for i, agent in enumerate(agents):
        actor_obs = build_observation(paradigm.info_structure, "actor", i, obs)
        critic_obs = build_observation(paradigm.info_structure, "critic", i, obs, actions)
        assert _dims(agent) == (len(actor_obs), len(critic_obs))
        assert agent.select_action(actor_obs, False, rng).shape == (env.specs[i].action_dim,)
