"""Python front end for the stochaction simulator."""

import json

from . import _stochaction as _core
from ._stochaction import ConfigurationError, DomainError, NumericalError, ValidationError

__all__ = [
    "ConfigurationError",
    "DomainError",
    "NumericalError",
    "ValidationError",
    "ensemble",
    "initial_state",
    "normalize",
    "preset",
    "preset_names",
    "run",
    "sample_deviations",
    "verify",
]


def _text(config):
    if isinstance(config, str):
        return json.dumps(preset(config))
    return json.dumps(config)


def preset_names():
    return list(_core.preset_names())


def preset(name):
    """Fully expanded config dict of a built-in scenario."""
    return json.loads(_core.preset_json(name))


def normalize(config):
    """Validate a config dict and fill in every default."""
    return json.loads(_core.normalize_json(json.dumps(config)))


def initial_state(config):
    return _core.initial_state(_text(config))


def ensemble(config, seed=None, trajectories=None, workers=0):
    """Snapshots of one ensemble run: wave function, positions, momenta."""
    return _core.ensemble(_text(config), seed, trajectories, workers)


def sample_deviations(lambda_mag, n, seed=0, sign=1):
    return _core.sample_deviations(lambda_mag, n, seed, sign)


def run(config, out_dir, seed=None, trajectories=None, references=False, workers=0):
    """Run a scenario (preset name or config dict) and write artifacts to out_dir."""
    return json.loads(_core.run(_text(config), str(out_dir), seed, trajectories, references, workers))


def verify(suite="quick", only=()):
    return json.loads(_core.verify(suite, list(only)))
