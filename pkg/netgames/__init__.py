__version__ = "0.1.0"

from .game import GameGraph, PlayerSpec, InfoStructure, build_observation
from .environment import Environment
from .supplychain import SupplyChain, TwoPlayerSupplyChain, MonopolyRetailer
from .epidemic import Epidemic
from .opinion import Opinion
from .ddpg import DDPGAgent
from .actorcritic import ActorCritic, GaussianPolicy
from .paradigm import Paradigm, make_agents
from .training import TrainingConfig, Trainer, RunRecord, run_seed, evaluate
from .storage import *

ENVIRONMENTS = {
    "supply_chain": SupplyChain,
    "supply_chain_2p": TwoPlayerSupplyChain,
    "retailer": MonopolyRetailer,
    "epidemic": Epidemic,
    "opinion": Opinion,
}

PARADIGMS = {p.value: p for p in Paradigm}
