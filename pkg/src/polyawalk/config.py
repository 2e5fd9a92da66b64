"""Resource caps and tunable thresholds.

Every computation that can blow up takes a :class:`Limits` instance.  The
defaults are sized for a desk machine; the CLI refuses to raise them
unless the caller passes ``--i-know``.
"""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

MEMORY_ENV = "POLYAWALK_MEMORY_BUDGET"


def _env_memory_budget(default: int = 2 * 1024**3) -> int:
    raw = os.environ.get(MEMORY_ENV)
    if not raw:
        return default
    try:
        value = int(float(raw))
    except ValueError:
        return default
    return value if value > 0 else default


@dataclass(frozen=True)
class Limits:
    max_dim: int = 4
    memory_budget: int = dataclasses.field(default_factory=_env_memory_budget)
    brute_force_budget: int = 10**8
    simulation_budget: int = 10**9
    exact_gap_max: int = 5000
    float_gap_max: int = 200_000
    weighted_work_budget: int = 10**8
    perm_search_max: int = 9
    stabilization_window: int = 20
    stabilization_tol: float = 1e-12
    z_soft: float = 3.5
    z_hard: float = 5.0

    def exceeds_defaults(self) -> list[str]:
        """Names of the caps that were raised above their defaults."""
        base = Limits()
        raised = []
        for f in dataclasses.fields(self):
            if f.name in ("stabilization_tol", "z_soft", "z_hard"):
                continue
            if getattr(self, f.name) > getattr(base, f.name):
                raised.append(f.name)
        return raised


DEFAULT_LIMITS = Limits()


def resolve(limits: Limits | None) -> Limits:
    return DEFAULT_LIMITS if limits is None else limits
