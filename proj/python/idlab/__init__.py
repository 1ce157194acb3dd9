"""Python access to the idlab experiment registry and a few core routines."""

import json

from ._idlab import (
    ConfigError,
    IdlabError,
    TriangularMap,
    explicit_map,
    gaussian_kr,
    ks_critical_value,
    ks_pvalue,
    rotation_counterexample,
    spearman_rho,
)
from . import _idlab

__all__ = [
    "ConfigError",
    "IdlabError",
    "TriangularMap",
    "config_schema",
    "explicit_map",
    "gaussian_kr",
    "ks_critical_value",
    "ks_pvalue",
    "list_experiments",
    "rotation_counterexample",
    "run_experiment",
    "spearman_rho",
]


def list_experiments():
    return json.loads(_idlab._list_json())


def config_schema():
    return json.loads(_idlab._schema_json())


def run_experiment(experiment, seed=0, params=None, jobs=1):
    """Run one registered experiment in-process and return its results dict."""
    config = {"experiment": experiment, "seed": seed, "params": params or {}}
    return json.loads(_idlab._run_json(json.dumps(config), jobs))
