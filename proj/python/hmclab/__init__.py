"""Holomorphic multiplicative chaos simulation."""

import json

from ._core import (
    DickmanTable,
    DomainError,
    IoError,
    NotPsdError,
    ResolutionError,
    SchemaError,
    SizeError,
    b_of_l,
    cue_secular,
    experiment_names,
    hmc_coeffs,
    limit_dickman_sum,
    moment_formula,
    sample_limit,
    split,
    tail_formula,
    version,
)
from ._core import run as _run


def run(config=None, **overrides):
    """Run an experiment; returns the manifest as a dict."""
    merged = dict(config or {})
    merged.update(overrides)
    return json.loads(_run(json.dumps(merged)))


__version__ = version()

__all__ = [
    "DickmanTable",
    "DomainError",
    "IoError",
    "NotPsdError",
    "ResolutionError",
    "SchemaError",
    "SizeError",
    "b_of_l",
    "cue_secular",
    "experiment_names",
    "hmc_coeffs",
    "limit_dickman_sum",
    "moment_formula",
    "run",
    "sample_limit",
    "split",
    "tail_formula",
    "version",
]
