"""Search and enumeration budgets.

Defaults can be overridden through environment variables, which is how the
command line tool exposes them:

    CAYLEYCI_ENUM_CAP       maximum group order for element enumeration
    CAYLEYCI_TUPLE_BUDGET   maximum n**k for tuple-orbit colorings
    CAYLEYCI_AUT_MAX_N      maximum vertex count for automorphism search
"""

from __future__ import annotations

import os
from dataclasses import dataclass

ENV_ENUM_CAP = "CAYLEYCI_ENUM_CAP"
ENV_TUPLE_BUDGET = "CAYLEYCI_TUPLE_BUDGET"
ENV_AUT_MAX_N = "CAYLEYCI_AUT_MAX_N"


@dataclass(frozen=True)
class Budget:
    enum_cap: int = 10**6
    tuple_budget: int = 10**7
    aut_max_n: int = 128
    brute_force_max_n: int = 8


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def current_budget() -> Budget:
    """Return the budget in effect, honouring environment overrides."""
    base = Budget()
    return Budget(
        enum_cap=_env_int(ENV_ENUM_CAP, base.enum_cap),
        tuple_budget=_env_int(ENV_TUPLE_BUDGET, base.tuple_budget),
        aut_max_n=_env_int(ENV_AUT_MAX_N, base.aut_max_n),
        brute_force_max_n=base.brute_force_max_n,
    )
