"""Driven three-level atom in an ultrastrongly coupled cavity: STIRAP simulator."""

from ._core import (
    IntegrationError,
    ConfigError,
    assemble_static,
    c0n,
    efficiency,
    kappa_scan,
    preset_names,
    run,
    spectrum,
    stray_falsification,
)

__all__ = [
    "IntegrationError",
    "ConfigError",
    "assemble_static",
    "c0n",
    "efficiency",
    "kappa_scan",
    "preset_names",
    "run",
    "spectrum",
    "stray_falsification",
]
