"""Python interface to the annealed leap-point sampler."""

import json as _json

from . import _alps
from ._alps import ConfigError, NoModesError, NumericalError, predicted_acceptance, preset_names

__all__ = [
    "ConfigError",
    "NoModesError",
    "NumericalError",
    "hat_log_density",
    "lais",
    "log_density",
    "predicted_acceptance",
    "preset_names",
    "pt",
    "resolve_config",
    "run",
    "running_prob_estimate",
    "scaling_experiment",
    "zellner_fit",
]


def _run(algorithm, config, out_dir):
    res = _alps.run(algorithm, _json.dumps(config), "" if out_dir is None else str(out_dir))
    for key in ("acceptance", "summary", "timing", "modes"):
        res[key] = _json.loads(res[key])
    return res


def run(config, out_dir=None):
    """ALPS run. ``config`` is a dict in the CLI's config format."""
    return _run("alps", config, out_dir)


def pt(config, out_dir=None):
    """Parallel tempering baseline."""
    return _run("pt", config, out_dir)


def lais(config, out_dir=None):
    """Single-level leap sampler."""
    return _run("lais", config, out_dir)


def resolve_config(config):
    """Config with the preset expanded and defaults filled in."""
    return _json.loads(_alps.resolve_config(_json.dumps(config)))


def log_density(target, x):
    return _alps.log_density(_json.dumps(target), list(map(float, x)))


def hat_log_density(target, modes, beta, x):
    """HAT log-density; ``modes`` is a registry as written to modes.json."""
    return _alps.hat_log_density(_json.dumps(target), _json.dumps(modes), float(beta), list(map(float, x)))


def running_prob_estimate(trace, threshold, burn_in, printed_normaliser=False):
    return _alps.running_prob_estimate(list(map(float, trace)), float(threshold), int(burn_in), printed_normaliser)


def scaling_experiment(shape="skew_normal", alpha=3.0, ell=1.0, dims=(10, 20, 40, 80), samples=100000, seed=1):
    return _alps.scaling_experiment(shape, alpha, ell, list(dims), samples, seed)


def zellner_fit(csv=None, tol=1e-6, max_iter=1000, rule="max_abs"):
    return _json.loads(_alps.zellner_fit("" if csv is None else str(csv), tol, max_iter, rule))
