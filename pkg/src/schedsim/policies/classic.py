"""FCFS, round-robin and preemptive EDF."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from ..model import MS, JobState
from .base import Decision, Policy, running_job


@dataclass(frozen=True)
class RrConfig:
    quantum: int = MS

    def __post_init__(self):
        if self.quantum < 1:
            raise ValueError("quantum must be >= 1")


def edf_select(ready: Iterable[JobState], now: int) -> int:
    """Nearest deadline first; ties go to the earlier arrival, then the lower id."""
    return min(ready, key=lambda j: j.edf_key).id


def fcfs_select(ready: Iterable[JobState], now: int) -> int:
    return min(ready, key=lambda j: (j.spec.arrival, j.spec.id)).id


def rr_select(queue: Iterable[JobState], now: int, cfg: RrConfig = RrConfig()) -> tuple:
    """Head of the cyclic FIFO ``queue`` and the slice it is granted."""
    head = next(iter(queue))
    return head.id, cfg.quantum


class EDF(Policy):
    name = "edf"

    def select(self, ready: Mapping[int, JobState], now: int):
        if not ready:
            return None
        return Decision(edf_select(ready.values(), now))


class FCFS(Policy):
    """Non-preemptive: whoever holds the CPU keeps it until completion."""

    name = "fcfs"

    def select(self, ready, now):
        if not ready:
            return None
        current = running_job(ready)
        if current is not None:
            return Decision(current.id)
        return Decision(fcfs_select(ready.values(), now))


class RoundRobin(Policy):
    name = "rr"

    def __init__(self, cfg: RrConfig = RrConfig()):
        self.cfg = cfg
        self.fifo = deque()

    def on_arrival(self, job, now):
        self.fifo.append(job.id)

    def on_quantum_expiry(self, job, now):
        self.fifo.remove(job.id)
        self.fifo.append(job.id)

    def on_completion(self, job, now):
        self.fifo.remove(job.id)

    on_abort = on_completion

    def select(self, ready, now):
        if not ready:
            return None
        current = running_job(ready)
        if current is not None:
            return Decision(current.id)
        job_id, quantum = rr_select((ready[i] for i in self.fifo), now, self.cfg)
        return Decision(job_id, quantum)
