"""Python front end for the srd solver core."""

import json

from . import _srd
from ._srd import AuditError, ConfigError, SolverError, normal_quantile, operator_spectrum, wiener_increments

__version__ = _srd.version

__all__ = [
    "AuditError",
    "ConfigError",
    "SolverError",
    "config_digest",
    "fhn_preset",
    "mollifier_levels",
    "normal_quantile",
    "operator_spectrum",
    "run_ensemble",
    "simulate",
    "suite_names",
    "verify",
    "wiener_increments",
]


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def fhn_preset():
    return json.loads(_srd.fhn_preset())


def config_digest(config):
    return _srd.config_digest(_text(config))


def suite_names():
    return list(_srd.suite_names())


def verify(config, suite, paths=None, workers=1):
    """Run a verification suite; returns the report as a dict."""
    return json.loads(_srd.run_suite(_text(config), suite, paths, workers))


def run_ensemble(config, paths=None, workers=1):
    return json.loads(_srd.run_ensemble(_text(config), paths, workers))


def simulate(config, path_index=0):
    """One trajectory; `states` has shape (stored times, components, cells)."""
    return _srd.simulate(_text(config), path_index)


def mollifier_levels(C, n_max):
    return list(_srd.mollifier_levels(C, n_max))
