"""Hankel norms and saturation of bounded symbols.

Specs and configs are plain dicts in the same JSON format the
``hankel-saturate`` CLI reads; results are the CLI's report dicts.
"""

import json

from . import _core
from ._core import (
    ConfigError,
    DomainError,
    GridError,
    HsatError,
    InapplicableError,
    ParseError,
    PreconditionError,
    ResolutionError,
    conjugate,
    hankel_norm_exact,
)

__version__ = _core.version()

COMMANDS = ("norm", "saturation", "weights", "claim", "examples")


def run(command, spec=None, **config):
    """Run one command and return the report as a dict.

    Keyword arguments are config keys (grid_exponent, n_max, tol_rel, ...).
    """
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    text, _ = _core.run(command, "" if spec is None else json.dumps(spec), json.dumps(config))
    return json.loads(text)


def norm(spec, **config):
    return run("norm", spec, **config)


def saturation(spec, **config):
    return run("saturation", spec, **config)


def weights(spec, **config):
    return run("weights", spec, **config)


def claim(spec, **config):
    return run("claim", spec, **config)


def examples(**config):
    return run("examples", None, **config)


__all__ = [
    "COMMANDS",
    "ConfigError",
    "DomainError",
    "GridError",
    "HsatError",
    "InapplicableError",
    "ParseError",
    "PreconditionError",
    "ResolutionError",
    "claim",
    "conjugate",
    "examples",
    "hankel_norm_exact",
    "norm",
    "run",
    "saturation",
    "weights",
]
