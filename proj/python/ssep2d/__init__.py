"""Python access to the ssep2d workbench."""

import json as _json

from ._core import (
    ConfigError,
    LatticeBall,
    Ssep2dError,
    detailed_balance as _detailed_balance,
    energy_basis,
    energy_closed,
    mobility,
    rate_I_Q_alpha,
    simulate,
    solve_instanton,
    upsilon_closed,
)
from ._core import rate_report_json as _rate_report_json
from ._core import verify_json as _verify_json

__all__ = [
    "ConfigError",
    "LatticeBall",
    "Ssep2dError",
    "detailed_balance",
    "energy_basis",
    "energy_closed",
    "mobility",
    "rate_I_Q_alpha",
    "rate_report",
    "simulate",
    "solve_instanton",
    "upsilon_closed",
    "verify",
]


def rate_report(config=None):
    """Rate functionals of a preset density, as a dict."""
    return _json.loads(_rate_report_json(_json.dumps(config or {})))


def detailed_balance(config=None):
    """Max relative detailed-balance violation for the configured ball and tilt."""
    return _detailed_balance(_json.dumps(config or {}))


def verify(criteria=(), suite="fast", seed=None):
    """Run acceptance criteria; returns one dict per criterion."""
    args = [list(criteria), suite]
    if seed is not None:
        args.append(seed)
    return _json.loads(_verify_json(*args))
