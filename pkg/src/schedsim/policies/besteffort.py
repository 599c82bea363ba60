"""Value-density best-effort policies: DASA (without dependencies) and LBESA.

Both build a tentative deadline-ordered schedule and dispatch its head.  Under
underload the tentative schedule holds every ready job, so both coincide with
EDF; under overload they differ in how they pick which jobs to give up on:

* DASA grows the schedule greedily, highest value density first, skipping any
  job whose insertion would make the schedule infeasible.
* LBESA starts from every ready job and sheds the lowest value density job
  until the remainder is feasible.

Value density is ``value / remaining``.  Jobs still live at their deadline are
aborted and earn nothing.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from ..feasibility import edf_order, feasible
from ..model import JobState
from .base import Decision, Policy


@dataclass(frozen=True)
class PvdEntry:
    job_id: int
    pvd: Fraction
    deadline: int

    @classmethod
    def of(cls, job: JobState) -> "PvdEntry":
        return cls(job.id, pvd(job), job.spec.deadline)


@dataclass(frozen=True)
class TentativeSchedule:
    jobs: tuple
    feasible: bool

    @property
    def head(self) -> Optional[int]:
        return self.jobs[0] if self.jobs else None


def pvd(job: JobState) -> Fraction:
    if job.remaining <= 0:
        raise ValueError(f"value density of finished job {job.id}")
    return job.spec.value / job.remaining


def _expired(jobs, now):
    return frozenset(j.id for j in jobs if j.spec.deadline <= now)


def dasa_schedule(jobs: Iterable[JobState], now: int) -> TentativeSchedule:
    by_density = sorted(jobs, key=lambda j: (-pvd(j), j.spec.deadline, j.id))
    schedule = []
    keys = []
    for job in by_density:
        pos = bisect.bisect(keys, job.edf_key)
        trial = schedule[:pos] + [job] + schedule[pos:]
        if feasible(trial, now):
            schedule = trial
            keys.insert(pos, job.edf_key)
    return TentativeSchedule(tuple(j.id for j in schedule), feasible(schedule, now))


def lbesa_schedule(jobs: Iterable[JobState], now: int) -> TentativeSchedule:
    schedule = edf_order(jobs)
    while not feasible(schedule, now):
        victim = min(schedule, key=lambda j: (pvd(j), -j.spec.deadline, -j.id))
        schedule.remove(victim)
    return TentativeSchedule(tuple(j.id for j in schedule), True)


def _fallback(candidates, now):
    # nothing fits: prefer a job that can still make its own deadline
    if not candidates:
        return None
    hopeful = [j for j in candidates if now + j.remaining <= j.spec.deadline]
    return min(hopeful or candidates, key=lambda j: j.edf_key).id


def _select(builder, ready: Iterable[JobState], now: int):
    ready = list(ready)
    aborts = _expired(ready, now)
    candidates = [j for j in ready if j.id not in aborts]
    schedule = builder(candidates, now)
    assert schedule.feasible
    job_id = schedule.head if schedule.jobs else _fallback(candidates, now)
    return job_id, aborts


def dasa_select(ready: Iterable[JobState], now: int) -> tuple:
    """``(job_id, aborts)`` chosen by DASA at ``now``."""
    return _select(dasa_schedule, ready, now)


def lbesa_select(ready: Iterable[JobState], now: int) -> tuple:
    """``(job_id, aborts)`` chosen by LBESA at ``now``."""
    return _select(lbesa_schedule, ready, now)


class _BestEffort(Policy):
    abort_on_miss = True
    _chooser = None

    def select(self, ready: Mapping[int, JobState], now: int):
        if not ready:
            return None
        job_id, aborts = type(self)._chooser(ready.values(), now)
        return Decision(job_id, None, aborts)


class DASA(_BestEffort):
    name = "dasa"
    _chooser = staticmethod(dasa_select)


class LBESA(_BestEffort):
    name = "lbesa"
    _chooser = staticmethod(lbesa_select)
