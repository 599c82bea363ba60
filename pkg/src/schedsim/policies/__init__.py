from __future__ import annotations

from ..model import SimConfig
from .base import Decision, Policy
from .besteffort import DASA, LBESA, dasa_select, lbesa_select
from .classic import EDF, FCFS, RoundRobin, RrConfig, edf_select, fcfs_select, rr_select

POLICY_NAMES = ("fcfs", "rr", "edf", "dasa", "lbesa", "nmlfq")


def make_policy(name: str, config: SimConfig = None) -> Policy:
    """Fresh policy instance for one run, configured from ``config``."""
    config = config or SimConfig()
    if name == "fcfs":
        return FCFS()
    if name == "rr":
        return RoundRobin(RrConfig(config.rr_quantum))
    if name == "edf":
        return EDF()
    if name == "dasa":
        return DASA()
    if name == "lbesa":
        return LBESA()
    if name == "nmlfq":
        from ..nmlfq import NMLFQ

        return NMLFQ(config.nmlfq)
    raise ValueError(f"unknown policy {name!r}; expected one of {', '.join(POLICY_NAMES)}")


__all__ = [
    "DASA", "EDF", "FCFS", "LBESA", "POLICY_NAMES", "Decision", "Policy", "RoundRobin",
    "RrConfig", "dasa_select", "edf_select", "fcfs_select", "lbesa_select", "make_policy",
    "rr_select",
]
