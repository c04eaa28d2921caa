"""Mean-force Gibbs states, their ultrastrong-coupling limits and the h-function bench."""

import json

from ._core import (
    ConfigError,
    InvariantError,
    PreconditionError,
    __version__,
    eigensolver_backend,
    gibbs,
    h_curves_csv,
    h_hyp,
    h_sin,
    mfgs,
    minimize_h,
    partial_trace_env,
    reference_qutrit,
    trace_distance,
    usc_cl_gcl2,
)
from . import _core


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def run_sweep(config):
    """Run a sweep from a config dict (or JSON text). Returns (csv_text, report_dict)."""
    csv, report = _core._run_sweep(_text(config))
    return csv, json.loads(report)


def config_echo(config):
    """Fully defaulted config as the sweep report records it."""
    return json.loads(_core._config_echo(_text(config)))


def run_props(config=None):
    """Proposition bench report; `config` is a sweep config whose "props" block is used."""
    return json.loads(_core._run_props(_text(config or {"family": "GCL2"})))


__all__ = [
    "ConfigError",
    "InvariantError",
    "PreconditionError",
    "__version__",
    "config_echo",
    "eigensolver_backend",
    "gibbs",
    "h_curves_csv",
    "h_hyp",
    "h_sin",
    "mfgs",
    "minimize_h",
    "partial_trace_env",
    "reference_qutrit",
    "run_props",
    "run_sweep",
    "trace_distance",
    "usc_cl_gcl2",
]
