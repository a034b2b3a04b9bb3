"""Finite-horizon LQ, H-infinity and Nash game control on Hilbert spaces.

System arguments may be a file path, a JSON string, or an already parsed
dict in the same schema the command-line tool reads.
"""

import json
import os

from . import _hilbertctl as _core
from ._hilbertctl import (
    AssumptionError,
    DesignInfeasibleError,
    DimensionError,
    EnumerationLimitError,
    HilbertctlError,
    ParseError,
    ResolutionError,
    StepError,
    example3_norm,
    example4_closed_form,
    example_ids,
)

__all__ = [
    "AssumptionError",
    "DesignInfeasibleError",
    "DimensionError",
    "EnumerationLimitError",
    "HilbertctlError",
    "ParseError",
    "ResolutionError",
    "StepError",
    "brl_check",
    "example3_norm",
    "example4_closed_form",
    "example_ids",
    "h2hinf_design",
    "hinf_design",
    "hinf_norm",
    "lq_solve",
    "nash_solve",
    "run_example",
]


def _system_text(system):
    if isinstance(system, dict):
        return json.dumps(system)
    if isinstance(system, (str, os.PathLike)) and os.path.isfile(system):
        with open(system, encoding="utf-8") as f:
            return f.read()
    if isinstance(system, str):
        return system
    raise TypeError("system must be a dict, a JSON string, or a file path")


def lq_solve(system):
    return json.loads(_core.lq_solve(_system_text(system)))


def brl_check(system, gamma):
    return json.loads(_core.brl_check(_system_text(system), float(gamma)))


def hinf_norm(system, tol_gamma=1e-6):
    return json.loads(_core.hinf_norm(_system_text(system), float(tol_gamma)))


def nash_solve(system, gamma, rho=0.0, verify=False, workers=1):
    return json.loads(
        _core.nash_solve(_system_text(system), float(gamma), float(rho),
                         bool(verify), int(workers)))


def hinf_design(system, gamma):
    return json.loads(_core.hinf_design(_system_text(system), float(gamma)))


def h2hinf_design(system, gamma):
    return json.loads(_core.h2hinf_design(_system_text(system), float(gamma)))


def run_example(example_id, dim=None, gamma=None, rho=None, tol_gamma=1e-7,
                seed=1, workers=1):
    return json.loads(
        _core.run_example(example_id, dim, gamma, rho, float(tol_gamma),
                          int(seed), int(workers)))
