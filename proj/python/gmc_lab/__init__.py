# SPDX-License-Identifier: Apache-2.0
"""Python access to the gmc_lab core: kernels, spectral certificates, field
synthesis and the Gaussian comparison oracles."""

import json as _json

from . import _gmc
from ._gmc import ConfigError, GateError, logplus_hat, p_star, zeta

__all__ = [
    "ConfigError",
    "GateError",
    "certificate",
    "config_digest",
    "gate",
    "kernel_value",
    "logplus_hat",
    "p_star",
    "read_grid",
    "run_oracles",
    "simulate",
    "zeta",
    "zeta_experiment",
]


def _text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def kernel_value(kernel, r):
    """K(r) for a kernel dict (dimension, lambda2, scale, remainder); inf at r = 0."""
    return _gmc.kernel_value(_text(kernel), r)


def certificate(d, T=1.0):
    """Spectral positivity profile of ln+(T/|x|) in dimension d."""
    return _json.loads(_gmc.positivity_certificate(d, T))


def config_digest(config):
    return _gmc.config_digest(_text(config))


def gate(config):
    """Raise GateError if the kernel is refused, ConfigError if malformed."""
    _gmc.gate(_text(config))


def simulate(config):
    """One dict per replica with `field` and `measure` numpy arrays."""
    return _gmc.simulate(_text(config))


def zeta_experiment(config):
    return _json.loads(_gmc.zeta_experiment(_text(config)))


def run_oracles(seed=1, mc_samples=1_000_000, instances=20):
    return _json.loads(_gmc.run_oracles(seed, mc_samples, instances))


def read_grid(path):
    """(header, values) for a .bin file written by `gmc_lab simulate`."""
    header, values = _gmc.read_grid(str(path))
    return _json.loads(header), values
