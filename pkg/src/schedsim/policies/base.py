from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from ..model import JobState, JobStatus


@dataclass(frozen=True)
class Decision:
    """What a policy wants at a scheduling point.

    ``quantum`` bounds the slice granted to ``job_id``; ``None`` means run until
    the next scheduling point.  When ``job_id`` is the job already holding the
    CPU, ``quantum=None`` keeps its current slice and a number replaces it.
    """

    job_id: Optional[int]
    quantum: Optional[int] = None
    aborts: frozenset = frozenset()


class Policy:
    """Callback interface the engine drives.

    ``ready`` maps job id to the live job states, including the job that
    currently holds the CPU (its state is ``RUNNING``).
    """

    name = "policy"
    #: engine aborts live jobs at their deadline when this is true
    abort_on_miss = False
    #: number of queue levels, for policies that have them
    level_count: Optional[int] = None

    def on_arrival(self, job: JobState, now: int) -> None:
        pass

    def on_completion(self, job: JobState, now: int) -> None:
        pass

    def on_quantum_expiry(self, job: JobState, now: int) -> None:
        pass

    def on_abort(self, job: JobState, now: int) -> None:
        pass

    def select(self, ready: Mapping[int, JobState], now: int) -> Optional[Decision]:
        raise NotImplementedError

    def level_of(self, job_id: int) -> Optional[int]:
        return None


def running_job(ready: Mapping[int, JobState]) -> Optional[JobState]:
    for j in ready.values():
        if j.state is JobStatus.RUNNING:
            return j
    return None
