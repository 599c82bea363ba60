"""Deadline feasibility checks shared by admission control and best-effort policies."""

from __future__ import annotations

from itertools import accumulate
from typing import Iterable, Sequence

from .model import JobState, TaskSpec


def feasible(jobs: Sequence[JobState], now: int) -> bool:
    """Can ``jobs``, run back to back in the given order from ``now``, all make their deadlines?

    The list is expected in deadline order; then this is exactly the EDF
    feasibility test for jobs that have all arrived.
    """
    done = now
    for j in jobs:
        done += j.remaining
        if done > j.spec.deadline:
            return False
    return True


def edf_order(jobs: Iterable[JobState]) -> list:
    return sorted(jobs, key=lambda j: j.edf_key)


def demand_feasible(jobs: Iterable[JobState], now: int) -> bool:
    """Processor-demand test for a set of already-arrived jobs, from ``now``."""
    return feasible(edf_order(jobs), now)


def max_safe_run(candidate: JobState, jobs: Iterable[JobState], now: int):
    """Longest run of ``candidate`` from ``now`` that keeps ``jobs`` EDF-feasible.

    Only deadlines strictly before the candidate's are squeezed by running it;
    returns ``None`` when nothing constrains the run.
    """
    others = [j for j in jobs if j.id != candidate.id and j.spec.deadline < candidate.spec.deadline]
    if not others:
        return None
    others = edf_order(others)
    cum = list(accumulate(j.remaining for j in others))
    return min(j.spec.deadline - now - c for j, c in zip(others, cum))


def workload_demand_feasible(tasks: Sequence[TaskSpec]) -> bool:
    """Processor-demand criterion over every [arrival, deadline] window of a one-shot workload."""
    starts = sorted({t.arrival for t in tasks})
    ends = sorted({t.deadline for t in tasks})
    for t1 in starts:
        for t2 in ends:
            if t2 <= t1:
                continue
            demand = sum(t.burst for t in tasks if t.arrival >= t1 and t.deadline <= t2)
            if demand > t2 - t1:
                return False
    return True
