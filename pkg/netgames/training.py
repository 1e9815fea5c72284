""" Multi-agent training: one Trainer owns the environment, the agents,
their replay buffers and all random streams of one seeded run.
"""
from dataclasses import dataclass, field, asdict
from io import BytesIO
import json
import logging
import warnings
import numpy as np

from .actorcritic import ActorCritic, generic_ac_update
from .ddpg import (DDPGAgent, HIDDEN, LR_ACTOR, LR_CRITIC, TAU, SIGMA_START, SIGMA_END,
                   exploration_sigma)
from .game import build_observation
from .lib.datalist import RecordList
from .lib.replay import Batch, ReplayBuffer, Transition
from .lib.utils import ConfigError, NumericalFault, require
from .paradigm import LEARNERS, Paradigm, make_agents
from .storage import ArtifactNotFoundError

logger = logging.getLogger(__name__)

EVAL_EPISODES = 10


def parse_seeds(value, base: int=0):
    """ A seed count or an explicit list of seeds.

    >>> parse_seeds(3, base=10)
    [10, 11, 12]
    >>> parse_seeds("3,5,9")
    [3, 5, 9]
    """
    if isinstance(value, str):
        parts = [x.strip() for x in value.split(",") if x.strip()]
        if len(parts) == 1 and "," not in value:
            value = parts[0]
        else:
            value = parts
    if isinstance(value, (list, tuple)):
        try:
            seeds = [int(x) for x in value]
        except ValueError:
            raise ConfigError(f"Invalid seed list: {value}", field="seeds")
        unique = list(dict.fromkeys(seeds))
        if len(unique) != len(seeds):
            warnings.warn(f"Duplicate seeds collapsed: {seeds}")
    else:
        try:
            count = int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"Invalid seed count: {value}", field="seeds")
        unique = list(range(base, base + count))
    if not unique:
        raise ConfigError("At least one seed is required", field="seeds")
    return unique


@dataclass
class TrainingConfig:
    """ Everything a run needs, apart from its seed """
    env: str
    env_config: dict = field(default_factory=dict)
    paradigm: Paradigm = Paradigm.INDIVIDUAL
    learner: str = "ddpg"
    episodes: int = 100
    horizon: int = 100
    seeds: list = field(default_factory=lambda: [0])
    buffer_capacity: int = 100000
    batch_size: int = 128
    warmup: int = 1000
    hidden: tuple = HIDDEN
    lr_actor: float = LR_ACTOR
    lr_critic: float = LR_CRITIC
    tau: float = TAU
    sigma_start: float = SIGMA_START
    sigma_end: float = SIGMA_END
    eval_episodes: int = EVAL_EPISODES
    initial: dict = field(default_factory=dict)
    name: str = None

    def __post_init__(self):
        from . import ENVIRONMENTS
        if self.env not in ENVIRONMENTS:
            raise ConfigError(f"Unknown environment '{self.env}'. "
                              f"Valid environments: {sorted(ENVIRONMENTS)}", field="env")
        try:
            self.paradigm = Paradigm(self.paradigm)
        except ValueError:
            raise ConfigError(f"Unknown paradigm '{self.paradigm}'. "
                              f"Valid paradigms: {[p.value for p in Paradigm]}",
                              field="paradigm")
        if self.learner not in LEARNERS:
            raise ConfigError(f"Unknown learner '{self.learner}'. Valid learners: {LEARNERS}",
                              field="learner")
        if self.learner == "actor_critic" and self.paradigm == Paradigm.CLDE_FULL:
            raise ConfigError("The actor_critic learner has no joint action critic, "
                              "use ddpg with clde_full", field="learner")
        for name, minimum in [("episodes", 0), ("horizon", 1), ("buffer_capacity", 1),
                              ("batch_size", 1), ("warmup", 0), ("eval_episodes", 0)]:
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < minimum:
                raise ConfigError(f"Must be an integer >= {minimum}, got {value}", field=name)
        self.seeds = parse_seeds(self.seeds)
        self.hidden = tuple(int(x) for x in self.hidden)
        if self.name is None:
            self.name = f"{self.env}_{self.paradigm.value}"

    def make_env(self):
        from . import ENVIRONMENTS
        return ENVIRONMENTS[self.env].init_from(self.env_config)

    def agent_kwargs(self):
        kwargs = {"lr_actor": self.lr_actor, "lr_critic": self.lr_critic}
        if self.learner == "ddpg":
            kwargs["tau"] = self.tau
        else:
            # Policy std as a fraction of the action width
            kwargs["sigma"] = self.sigma_start
        return kwargs

    def to_dict(self):
        """ Plain config echo, as written to summary documents """
        out = asdict(self)
        out["paradigm"] = self.paradigm.value
        out["hidden"] = list(self.hidden)
        return out

    @classmethod
    def init_from(cls, args: dict, base_seed: int=0):
        """Create a config from a Python object, e.g. a parsed config file.

        Learning hyperparameters may sit at the top level or in a
        `training` section.
        """
        require(args, "env")
        flat = dict(args.get("training") or {})
        flat.update({k: v for k, v in args.items() if k != "training"})
        if "env_config" not in flat:
            flat["env_config"] = {}
        if not isinstance(flat["env_config"], dict):
            raise ConfigError("Must be a mapping", field="env_config")
        flat["seeds"] = parse_seeds(flat.get("seeds", 1), base=base_seed)
        known = cls.__dataclass_fields__.keys()
        return cls(**{k: v for k, v in flat.items() if k in known})


def record_columns(env):
    """ Columns of the per-episode record of an environment """
    n = env.n_players
    columns = ["seed", "episode"]
    columns += [f"reward_{i}" for i in range(n)] + ["total_reward"]
    for i in range(n):
        columns += [f"mean_{label}_{i}" for label in env.action_labels(i)]
    return columns + list(env.metric_names)


def joint_observation(obs):
    return np.concatenate([np.atleast_1d(o) for o in obs])


def act(agents, paradigm: Paradigm, env, obs, explore: bool, rng):
    """ Every player's action given the observed states. Actors see states
    only, so this is also the decentralized execution policy.
    """
    if paradigm.centralized:
        joint = agents[0].select_action(joint_observation(obs), explore, rng)
        bounds = np.cumsum([0] + env.action_dims)
        return [joint[a:b] for a, b in zip(bounds[:-1], bounds[1:])]
    info = paradigm.info_structure
    return [agent.select_action(build_observation(info, "actor", i, obs), explore, rng)
            for i, agent in enumerate(agents)]


def evaluate(agents, env, paradigm, episodes: int, seeds, horizon: int, initial: dict=None):
    """ Roll out the greedy policies and report per-player rewards and
    metrics: the mean over episodes for each seed, then the mean and
    population variance of those across seeds.
    """
    paradigm = Paradigm(paradigm)
    initial = initial or {}
    names = [f"reward_{i}" for i in range(env.n_players)] + ["total_reward"]
    names += list(env.metric_names)
    per_seed = {k: [] for k in names}
    for seed in seeds:
        rng = np.random.default_rng(seed)
        values = {k: [] for k in names}

        def policy(t, obs):
            return act(agents, paradigm, env, obs, False, rng)

        for _ in range(episodes):
            _, infos, totals = env.simulate(policy, rng, horizon, **initial)
            for i in range(env.n_players):
                values[f"reward_{i}"].append(float(totals[i]))
            values["total_reward"].append(float(np.sum(totals)))
            for k, v in env.episode_metrics(infos).items():
                values[k].append(float(v))
        for k in names:
            per_seed[k].append(float(np.mean(values[k])) if values[k] else 0.0)
    return {
        "mean": {k: float(np.mean(v)) for k, v in per_seed.items()},
        "var": {k: float(np.var(v)) for k, v in per_seed.items()},
    }


class RunRecord(object):
    """ Per-episode results of one seeded run """

    def __init__(self, seed: int, columns: list, rows: RecordList=None, failed: bool=False,
                 error: str=None, evaluation: dict=None):
        self.seed = seed
        self.rows = rows if rows is not None else RecordList(columns=columns)
        self.failed = failed
        self.error = error
        self.evaluation = evaluation
        # {"key": ..., "episode": ...} for every checkpoint written
        self.checkpoints = []

    @property
    def columns(self):
        return self.rows.columns

    @property
    def as_csv(self):
        return self.rows.as_csv

    def __len__(self):
        return len(self.rows)

    def summary(self, window: int=500):
        """ Means over the last `window` episodes, plus the evaluation """
        final = {}
        tail = self.rows[-window:] if window else self.rows[:]
        for col in self.columns:
            if col in ["seed", "episode"]:
                continue
            values = [r[col] for r in tail]
            final[col] = float(np.mean(values)) if values else None
        return {
            "seed": self.seed,
            "episodes": len(self.rows),
            "failed": self.failed,
            "error": self.error,
            "final": final,
            "evaluation": self.evaluation,
            "checkpoints": list(self.checkpoints),
        }

    def __repr__(self):
        status = "failed" if self.failed else "ok"
        return "<{cls}: seed {seed}, {n} episodes, {status}>".format(
            cls=type(self).__name__, seed=self.seed, n=len(self.rows), status=status)


class Trainer(object):
    """ Trains the agents of one paradigm on one environment, for one seed.

    Random streams are spawned from the seed, one each for the environment,
    network initialization, exploration and every replay buffer.

    DDPG agents learn off-policy from their replay buffers after every
    step. Actor-critic learners take one on-policy step per episode, on
    the transitions of that episode.
    """

    def __init__(self, config: TrainingConfig, seed: int):
        self.config = config
        self.seed = int(seed)
        self.paradigm = config.paradigm
        self.on_policy = config.learner == "actor_critic"
        self.env = config.make_env()

        env_seq, init_seq, explore_seq, buffer_seq = np.random.SeedSequence(self.seed).spawn(4)
        self.env_rng = np.random.default_rng(env_seq)
        self.explore_rng = np.random.default_rng(explore_seq)
        self.agents = make_agents(self.paradigm, self.env, np.random.default_rng(init_seq),
                                  hidden=config.hidden, learner=config.learner,
                                  **config.agent_kwargs())
        self.buffers = [ReplayBuffer(config.buffer_capacity, np.random.default_rng(s))
                        for s in buffer_seq.spawn(len(self.agents))]

        self.episode = 0
        self.total_steps = 0
        self.record = RunRecord(self.seed, record_columns(self.env))

    def _set_exploration(self, episode):
        if self.on_policy:
            # Stochastic policies explore with their own noise
            return
        for agent in self.agents:
            agent.exploration_sigma = exploration_sigma(
                episode, self.config.episodes, agent.action_low, agent.action_high,
                start=self.config.sigma_start, end=self.config.sigma_end)

    def _learner_view(self, i, obs, actions, rewards, next_obs):
        """ (observation, action, reward, next observation) of one step as
        learner i sees it
        """
        if self.paradigm.centralized:
            return (joint_observation(obs), joint_observation(actions), float(np.sum(rewards)),
                    joint_observation(next_obs))
        info = self.paradigm.info_structure
        return (build_observation(info, "actor", i, obs), actions[i], float(rewards[i]),
                build_observation(info, "actor", i, next_obs))

    def _store(self, obs, actions, rewards, next_obs):
        joint_action = joint_observation(actions) if self.paradigm == Paradigm.CLDE_FULL else None
        for i, buf in enumerate(self.buffers):
            o, a, r, o_next = self._learner_view(i, obs, actions, rewards, next_obs)
            # Time limits are not terminal states
            buf.push(Transition(o, a, r, o_next, terminal=False, joint_action=joint_action))

    def _update_on_policy(self, steps):
        """ One generic actor-critic update per learner on an episode's
        steps. The next action of the last step is the greedy one.
        """
        for i, learner in enumerate(self.agents):
            views = [self._learner_view(i, *step) for step in steps]
            transitions = []
            for k, (o, a, r, o_next) in enumerate(views):
                if k + 1 < len(views):
                    a_next = views[k + 1][1]
                else:
                    a_next = learner.select_action(o_next, False, None)
                transitions.append(Transition(o, a, r, o_next, next_action=a_next))
            try:
                generic_ac_update(learner, Batch.stack(transitions))
            except NumericalFault as err:
                err.player = i
                raise

    def _update(self):
        """ All critics, then all actors, in ascending player order, then
        the target networks.
        """
        batches = [buf.sample(self.config.batch_size) for buf in self.buffers]
        targets = []
        for agent, batch in zip(self.agents, batches):
            next_action = None
            if self.paradigm == Paradigm.CLDE_FULL:
                # Public states: every actor sees the same observation
                next_action = np.concatenate([a.target_actor.forward(batch.next_obs)
                                              for a in self.agents], axis=1)
            targets.append(agent.critic_target(batch, next_action))
        for i, (agent, batch, y) in enumerate(zip(self.agents, batches, targets)):
            try:
                agent.update_critic(batch, y)
            except NumericalFault as err:
                err.player = i
                raise
        for i, (agent, batch) in enumerate(zip(self.agents, batches)):
            try:
                agent.update_actor(batch)
            except NumericalFault as err:
                err.player = i
                raise
        for agent in self.agents:
            agent.soft_update_targets()

    def train_episode(self):
        """ Run one exploring episode, learning along the way. Returns the
        episode's record row.
        """
        env, config = self.env, self.config
        self._set_exploration(self.episode)
        state = env.reset(self.env_rng, **config.initial)
        totals = np.zeros(env.n_players)
        action_sums = [np.zeros(d) for d in env.action_dims]
        infos = []
        steps = []
        for t in range(config.horizon):
            try:
                obs = env.observed_states(state)
                actions = act(self.agents, self.paradigm, env, obs, True, self.explore_rng)
                next_state, rewards, info = env.step(state, actions, self.env_rng)
                rewards = env.check_rewards(rewards)
                next_obs = env.observed_states(next_state)
                self.total_steps += 1
                if self.on_policy:
                    steps.append((obs, actions, rewards, next_obs))
                else:
                    self._store(obs, actions, rewards, next_obs)
                    if self.total_steps >= config.warmup:
                        self._update()
            except NumericalFault as err:
                err.episode, err.step = self.episode, t
                raise
            for i, a in enumerate(actions):
                action_sums[i] += a
            totals += rewards
            infos.append(info)
            state = next_state
        if self.on_policy:
            try:
                self._update_on_policy(steps)
            except NumericalFault as err:
                err.episode, err.step = self.episode, config.horizon - 1
                raise

        row = {"seed": self.seed, "episode": self.episode}
        for i in range(env.n_players):
            row[f"reward_{i}"] = float(totals[i])
        row["total_reward"] = float(np.sum(totals))
        for i in range(env.n_players):
            for label, total in zip(env.action_labels(i), action_sums[i]):
                row[f"mean_{label}_{i}"] = float(total / config.horizon)
        for k, v in env.episode_metrics(infos).items():
            row[k] = float(v)
        self.episode += 1
        return row

    def train(self, until: int=None):
        """ Train up to episode `until` (default: all configured episodes).
        A numerical fault stops the run and marks the record failed.
        """
        until = self.config.episodes if until is None else min(until, self.config.episodes)
        if self.episode == 0:
            logger.info("Training %s, seed %d, %d episodes", self.config.name, self.seed,
                        self.config.episodes)
        while self.episode < until and not self.record.failed:
            try:
                row = self.train_episode()
            except NumericalFault as err:
                self.record.failed = True
                self.record.error = err.diagnostics
                logger.error("Run %s seed %d aborted: %s", self.config.name, self.seed,
                             err.diagnostics)
                break
            self.record.rows.append(row)
            logger.debug("Seed %d episode %d: total reward %.4f", self.seed, row["episode"],
                         row["total_reward"])
        if self.episode >= self.config.episodes and not self.record.failed:
            logger.info("Finished %s, seed %d", self.config.name, self.seed)
        return self.record

    def evaluate(self, episodes: int=None, seeds=None):
        episodes = self.config.eval_episodes if episodes is None else episodes
        seeds = [self.seed] if seeds is None else seeds
        return evaluate(self.agents, self.env, self.paradigm, episodes, seeds,
                        self.config.horizon, initial=self.config.initial)

    def save_checkpoint(self, key, storage):
        """ Write agents, buffers, counters, rows and rng states as one .npz """
        self.record.checkpoints.append({"key": key, "episode": self.episode})
        arrays = {}
        for k, agent in enumerate(self.agents):
            arrays.update(agent.to_arrays(f"agent{k}."))
        for k, buf in enumerate(self.buffers):
            arrays.update(_buffer_arrays(buf, f"buffer{k}."))
        meta = {
            "seed": self.seed,
            "episode": self.episode,
            "total_steps": self.total_steps,
            "failed": self.record.failed,
            "error": self.record.error,
            "rows": list(self.record.rows),
            "checkpoints": list(self.record.checkpoints),
            "env_rng": self.env_rng.bit_generator.state,
            "explore_rng": self.explore_rng.bit_generator.state,
            "buffer_rngs": [buf.rng.bit_generator.state for buf in self.buffers],
        }
        arrays["meta"] = np.array(json.dumps(meta))
        buf = BytesIO()
        np.savez(buf, **arrays)
        buf.seek(0)
        storage.save(key, buf, "npz")
        logger.debug("Saved checkpoint %s at episode %d", key, self.episode)

    @classmethod
    def from_checkpoint(cls, config: TrainingConfig, stream):
        """ Resume a run saved with save_checkpoint(). Training continues
        exactly as if it had never stopped.
        """
        with np.load(stream, allow_pickle=False) as data:
            arrays = {k: data[k] for k in data.files}
        meta = json.loads(str(arrays["meta"]))
        trainer = cls(config, meta["seed"])
        agent_cls = ActorCritic if trainer.on_policy else DDPGAgent
        trainer.agents = [agent_cls.from_arrays(arrays, f"agent{k}.")
                          for k in range(len(trainer.agents))]
        for k, buf in enumerate(trainer.buffers):
            _restore_buffer(buf, arrays, f"buffer{k}.")
            buf.rng.bit_generator.state = meta["buffer_rngs"][k]
        trainer.env_rng.bit_generator.state = meta["env_rng"]
        trainer.explore_rng.bit_generator.state = meta["explore_rng"]
        trainer.episode = meta["episode"]
        trainer.total_steps = meta["total_steps"]
        trainer.record.failed = meta["failed"]
        trainer.record.error = meta["error"]
        for row in meta["rows"]:
            trainer.record.rows.append(row)
        trainer.record.checkpoints = list(meta.get("checkpoints", []))
        return trainer

    def __repr__(self):
        return "<{cls}: {name}, seed {seed}, episode {ep}>".format(
            cls=type(self).__name__, name=self.config.name, seed=self.seed, ep=self.episode)


def _buffer_arrays(buf: ReplayBuffer, prefix):
    arrays = {prefix + "size": np.array(len(buf))}
    if not len(buf):
        return arrays
    items = list(buf)
    arrays[prefix + "obs"] = np.stack([tr.obs for tr in items])
    arrays[prefix + "action"] = np.stack([tr.action for tr in items])
    arrays[prefix + "reward"] = np.array([tr.reward for tr in items])
    arrays[prefix + "next_obs"] = np.stack([tr.next_obs for tr in items])
    arrays[prefix + "terminal"] = np.array([tr.terminal for tr in items])
    if items[0].joint_action is not None:
        arrays[prefix + "joint_action"] = np.stack([tr.joint_action for tr in items])
    return arrays


def _restore_buffer(buf: ReplayBuffer, arrays, prefix):
    joint = arrays.get(prefix + "joint_action")
    for k in range(int(arrays[prefix + "size"])):
        buf.push(Transition(arrays[prefix + "obs"][k], arrays[prefix + "action"][k],
                            float(arrays[prefix + "reward"][k]), arrays[prefix + "next_obs"][k],
                            terminal=bool(arrays[prefix + "terminal"][k]),
                            joint_action=None if joint is None else joint[k]))


def run_seed(config: TrainingConfig, seed: int, storage=None, resume: bool=False):
    """ Train and then evaluate one seed.

    :param storage: where checkpoint_<seed>.npz is written, at the halfway
        and the final episode. No checkpoints without a storage.
    :param resume: continue from the checkpoint in `storage`, if there is one
    """
    key = f"checkpoint_{seed}"
    trainer = None
    if resume and storage is not None:
        try:
            trainer = Trainer.from_checkpoint(config, storage.load(key, "npz"))
        except ArtifactNotFoundError:
            logger.warning("No checkpoint for seed %d, starting from scratch", seed)
        else:
            logger.info("Resuming seed %d at episode %d", seed, trainer.episode)
    if trainer is None:
        trainer = Trainer(config, seed)

    halfway = config.episodes // 2
    if storage is not None and trainer.episode < halfway:
        trainer.train(until=halfway)
        trainer.save_checkpoint(key, storage)
    record = trainer.train()
    if storage is not None:
        trainer.save_checkpoint(key, storage)
    if not record.failed and config.eval_episodes:
        try:
            record.evaluation = trainer.evaluate()
        except NumericalFault as err:
            record.failed = True
            record.error = err.diagnostics
            logger.error("Evaluation of seed %d aborted: %s", seed, err.diagnostics)
    return record
