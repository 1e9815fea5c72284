""" Command line entry point: train and evaluate one paradigm on one
environment over many seeds, and write the run records, learning curves
and a summary.

    netgames --env supply_chain_2p --paradigm individual --episodes 10 --seeds 1
"""
from concurrent.futures import ProcessPoolExecutor
from functools import partial
import argparse
import json
import logging
import os
import sys

from dotenv import load_dotenv

from .lib.utils import ConfigError, ConfigNotFoundError, load_config, PRESET_DIR
from .report import NoSuccessfulRuns, summarize, summary_document
from .storage import open_storage
from .training import TrainingConfig, run_seed

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s--%(levelname)s--%(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

DESK_EPISODES = 2000
DESK_SEEDS = 10


def build_parser():
    parser = argparse.ArgumentParser(
        prog="netgames",
        description="Train multi-agent learners on networked stochastic games")
    parser.add_argument("--config", help="Preset name or path to a YAML/JSON config")
    parser.add_argument("--env", help="Environment name, e.g. supply_chain_2p")
    parser.add_argument("--paradigm",
                        help="individual, clde_state, clde_full or centralized")
    parser.add_argument("--learner", help="ddpg (default) or actor_critic")
    parser.add_argument("--episodes", type=int, help="Training episodes per seed")
    parser.add_argument("--horizon", type=int, help="Steps per episode")
    parser.add_argument("--seeds",
                        help="Number of seeds, counted from the base seed, "
                             "or an explicit comma separated list")
    parser.add_argument("--eval-episodes", type=int, dest="eval_episodes",
                        help="Greedy evaluation episodes per seed")
    parser.add_argument("--out", default="runs", help="Output directory (default: runs)")
    parser.add_argument("--name", help="Experiment name, used as output sub directory")
    parser.add_argument("--workers", type=int, default=1,
                        help="Seeds to run in parallel (default: 1)")
    parser.add_argument("--desk", action="store_true",
                        help=f"Scale down to {DESK_EPISODES} episodes and {DESK_SEEDS} seeds")
    parser.add_argument("--s3-bucket", dest="s3_bucket",
                        help="Write artifacts to this S3 bucket instead of --out")
    parser.add_argument("--resume", action="store_true",
                        help="Continue every seed from its checkpoint, when there is one")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="Log every episode")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="Only log errors")
    return parser


def setup_logging(verbose=False, quiet=False):
    """ Root handler with timestamps. Returns the handler. """
    level = logging.DEBUG if verbose else logging.ERROR if quiet else logging.INFO
    root = logging.getLogger()
    root.setLevel(level)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    root.addHandler(handler)
    return handler


def config_document(args):
    """ The config document given by --config or --env, with command line
    overrides applied. An --env without --config starts from the preset of
    the same name, when there is one.
    """
    if args.config:
        doc = load_config(args.config)
    elif args.env:
        preset = os.path.join(PRESET_DIR, args.env + ".yaml")
        doc = load_config(args.env) if os.path.isfile(preset) else {}
    else:
        raise ConfigError("Give either --config or --env", field="env")

    if args.env:
        if doc.get("env") not in [None, args.env]:
            doc = {k: v for k, v in doc.items() if k != "env_config"}
        doc["env"] = args.env
    if args.desk:
        doc["episodes"] = DESK_EPISODES
        doc["seeds"] = DESK_SEEDS
    for key in ["paradigm", "learner", "episodes", "horizon", "seeds", "eval_episodes", "name"]:
        value = getattr(args, key)
        if value is not None:
            doc[key] = value
    return doc


def base_seed():
    value = os.environ.get("NETGAME_SEED")
    if value is None or value == "":
        return 0
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"NETGAME_SEED must be an integer, got '{value}'")


def run_all(config: TrainingConfig, workers: int=1, storage=None, resume: bool=False):
    """ One RunRecord per seed, in seed order. Checkpoints go to `storage`. """
    run = partial(run_seed, storage=storage, resume=resume)
    if workers > 1 and len(config.seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(run, [config] * len(config.seeds), config.seeds))
    return [run(config, seed) for seed in config.seeds]


def write_artifacts(records, config: TrainingConfig, storage):
    """ seed_<k>.csv per successful run, curves.csv and summary.json """
    for record in records:
        if not record.failed:
            storage.save(f"seed_{record.seed}", record.as_csv, "csv")
    try:
        curves = summarize(records)
    except NoSuccessfulRuns:
        curves = None
    else:
        storage.save("curves", curves.as_csv, "csv")
    summary = summary_document(records, config.to_dict())
    storage.save("summary", json.dumps(summary, indent=2), "json")
    return curves, summary


def main(argv=None):
    """ Run an experiment. Returns the exit code. """
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return err.code

    handlers = [setup_logging(args.verbose, args.quiet)]
    try:
        try:
            config = TrainingConfig.init_from(config_document(args), base_seed=base_seed())
            # Fail on bad environment settings before any run starts
            config.make_env()
        except ConfigNotFoundError as err:
            logger.error(str(err))
            return EXIT_CONFIG
        except (ConfigError, ValueError, TypeError) as err:
            logger.error("Invalid config: %s", err)
            return EXIT_CONFIG
        if args.workers < 1:
            logger.error("--workers must be at least 1")
            return EXIT_CONFIG

        storage = open_storage(config.name, args.out, args.s3_bucket)
        if not args.s3_bucket:
            directory = os.path.join(args.out, config.name)
            os.makedirs(directory, exist_ok=True)
            file_handler = logging.FileHandler(os.path.join(directory, "run.log"), mode="w")
            file_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
            logging.getLogger().addHandler(file_handler)
            handlers.append(file_handler)

        logger.info("Experiment %s: %s / %s, %d episodes, seeds %s", config.name, config.env,
                    config.paradigm.value, config.episodes, config.seeds)
        records = run_all(config, args.workers, storage=storage, resume=args.resume)
        write_artifacts(records, config, storage)

        failed = [r for r in records if r.failed]
        for record in failed:
            logger.error("Run %s seed %d failed: %s", config.name, record.seed, record.error)
        if len(failed) == len(records):
            logger.error("No successful runs in %s", config.name)
        if failed:
            return EXIT_RUNTIME
        logger.info("Wrote artifacts of %s", config.name)
        return EXIT_OK
    finally:
        for h in handlers:
            logging.getLogger().removeHandler(h)
            h.close()


if __name__ == "__main__":
    sys.exit(main())
