"""Lip-field regularized softening bar: simulations, projections, damage update.

Configs are plain dicts with the same schema as the CLI's JSON files. A string
argument names a preset.
"""

import json

import numpy as np

from . import _core
from ._core import (
    ConfigError,
    DomainError,
    InvalidArgument,
    NonConvergence,
    PreconditionError,
    SingularSystem,
    StepFailure,
    is_lip,
    lip_constant,
    lower_projection,
    upper_projection,
)

__all__ = [
    "ConfigError", "DomainError", "InvalidArgument", "NonConvergence",
    "PreconditionError", "SingularSystem", "StepFailure",
    "bar_presets", "pointwise_presets", "preset", "resolve",
    "run_bar", "run_pointwise", "is_lip", "lip_constant",
    "lower_projection", "upper_projection", "solve_damage", "return_map", "run_checks",
]


def bar_presets():
    return list(_core.bar_preset_names())


def pointwise_presets():
    return list(_core.pointwise_preset_names())


def preset(name):
    return json.loads(_core.preset_json(name))


def _config(config):
    return preset(config) if isinstance(config, str) else config


def _arrays(columns):
    return {k: np.asarray(v) for k, v in columns.items()}


def resolve(config):
    """Fully explicit config, as written to resolved_config.json."""
    c = _config(config)
    text = json.dumps(c)
    if "history" in c:
        return json.loads(_core.resolve_pointwise_json(text))
    return json.loads(_core.resolve_bar_json(text))


def run_bar(config):
    """Run a bar scenario. Curve and snapshot columns come back as numpy arrays."""
    out = json.loads(_core.run_bar_json(json.dumps(_config(config))))
    out["curve"] = _arrays(out["curve"])
    out["centroids"] = np.asarray(out["centroids"])
    out["final_damage"] = np.asarray(out["final_damage"])
    out["snapshots"] = [
        {k: (v if k == "step" else np.asarray(v)) for k, v in s.items()} for s in out["snapshots"]
    ]
    return out


def run_pointwise(config):
    out = json.loads(_core.run_pointwise_json(json.dumps(_config(config))))
    out["curve"] = _arrays(out["curve"])
    return out


def solve_damage(model, strain, d_n, l, plastic_strain=None, cumulative_plastic=None,
                 bar_length=1.0):
    """One constrained damage update with strains and plastic fields frozen."""
    strain = np.asarray(strain, dtype=float)
    zeros = np.zeros_like(strain)
    return _core.solve_damage(
        json.dumps(model), strain,
        zeros if plastic_strain is None else np.asarray(plastic_strain, dtype=float),
        zeros if cumulative_plastic is None else np.asarray(cumulative_plastic, dtype=float),
        np.asarray(d_n, dtype=float), l, bar_length)


def return_map(model, strain, damage, plastic_strain_n=0.0, cumulative_plastic_n=0.0):
    return _core.return_map(json.dumps(model), strain, plastic_strain_n, cumulative_plastic_n,
                            damage)


def run_checks(seed=20240611, quick=True):
    """Randomized property suite; returns the same report as `lipfield check`."""
    return json.loads(_core.run_checks_json(seed, quick))
