""" Various utility methods """
import os
import numpy as np
import yaml


HERE = os.path.dirname(__file__)
PRESET_DIR = os.path.join(HERE, '..', 'presets')


class ConfigNotFoundError(FileNotFoundError):
    """ No preset or config file matching the given name could be found """
    pass


class ConfigError(ValueError):
    """ A config document could be read, but holds an invalid value """

    def __init__(self, message, field=None, line=None, column=None):
        self.field = field
        self.line = line
        self.column = column
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}, column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class NumericalFault(FloatingPointError):
    """ A NaN or infinite value turned up where a finite one is required """

    def __init__(self, message, player=None, field=None, episode=None, step=None):
        self.player = player
        self.field = field
        self.episode = episode
        self.step = step
        super().__init__(message)

    @property
    def diagnostics(self):
        parts = [str(self)]
        for name in ["player", "field", "episode", "step"]:
            value = getattr(self, name)
            if value is not None:
                parts.append(f"{name}={value}")
        return ", ".join(parts)


def load_config(name):
    """ Load a config document, either a built in preset or a file.

    Presets are looked up by name in the presets directory first, then
    `name` is treated as a path. JSON documents are read by the same
    loader, as JSON is valid YAML.
    """
    candidates = [
        os.path.join(PRESET_DIR, name + ".yaml"),
        os.path.join(PRESET_DIR, name + ".json"),
        name,
    ]
    for path in candidates:
        if os.path.isfile(path):
            break
    else:
        raise ConfigNotFoundError(f"No such preset or config file found: {name}")

    with open(path, "r") as file_:
        try:
            doc = yaml.safe_load(file_)
        except yaml.YAMLError as err:
            mark = getattr(err, "problem_mark", None)
            if mark is not None:
                raise ConfigError(f"Unable to parse {path}: {err.problem}",
                                  line=mark.line + 1, column=mark.column + 1)
            raise ConfigError(f"Unable to parse {path}: {err}")

    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} must hold a mapping at the top level")
    return doc


def require(args, key, where=None):
    """ Get a required key from a config dict """
    if key not in args:
        field = key if where is None else f"{where}.{key}"
        raise ConfigError("Missing required value", field=field)
    return args[key]


def per_player(value, n_players, name="value"):
    """ Broadcast a scalar to one value per player, or check a list's length.

    >>> per_player(0.05, 2)
    [0.05, 0.05]
    """
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) != n_players:
            raise ValueError(f"'{name}' must have one entry per player "
                             f"({n_players}), got {len(value)}")
        return list(value)
    return [value] * n_players


def positive_part(x):
    """ (x)_+ """
    return np.maximum(x, 0.0)


def check_finite(values, field, player=None):
    """ Raise a NumericalFault unless every entry is finite """
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NumericalFault(f"Non-finite value in {field}", player=player, field=field)
    return arr


def format_vector(values):
    """ Space separated, round-trippable floats, for vector valued CSV cells """
    return " ".join(repr(float(x)) for x in np.atleast_1d(values))
