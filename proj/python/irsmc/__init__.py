"""Python front end for the irsmc simulator core."""

import json

from . import _core
from ._core import CSV_HEADER, ConfigError, InfeasibleError, factor

__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "InfeasibleError",
    "default_config",
    "effective_channels",
    "factor",
    "run",
    "sweep_csv",
]


def _dump(cfg):
    return "" if cfg is None else json.dumps(cfg)


def default_config():
    return json.loads(_core.default_config_json())


def run(baseline="proposed", config=None, seed=1):
    return _core.run(baseline, _dump(config), seed)


def effective_channels(config=None, seed=1):
    return _core.effective_channels(_dump(config), seed)


def sweep_csv(experiment):
    return _core.sweep_csv(json.dumps(experiment))
