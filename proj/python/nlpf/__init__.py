"""Nonlocal phase-field scheme with inertia: scenario runs, discrete identity
checks, and step-refinement rate studies.

All entry points take scenario text in the same sectioned key = value format
the command-line driver reads; ``default_config_text()`` shows every key.
"""

from ._core import (
    canonicalize,
    check,
    convolve,
    default_config_text,
    dual_norm,
    rates,
    run,
    validate,
)

__all__ = [
    "canonicalize",
    "check",
    "convolve",
    "default_config_text",
    "dual_norm",
    "rates",
    "run",
    "validate",
]
