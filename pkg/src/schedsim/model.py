"""Tasks, workloads, job lifecycle and simulation configuration.

Time is measured in integer ticks; one tick is a nominal microsecond, so a
millisecond is ``MS = 1000`` ticks.  Plain ``int`` is used for both time
points and durations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

MS = 1000


def elapsed(start: int, end: int) -> int:
    """Duration from ``start`` to ``end``; going backwards is an error."""
    if end < start:
        raise ValueError(f"time went backwards: {end} < {start}")
    return end - start


@dataclass(frozen=True)
class TaskSpec:
    """One aperiodic job: when it arrives, how much CPU it needs, and by when.

    ``value`` is the benefit accrued iff the job completes by its deadline.
    """

    id: int
    arrival: int
    burst: int
    deadline: int
    value: Fraction = Fraction(1)

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))


class JobStatus(enum.Enum):
    NOT_ARRIVED = "NotArrived"
    READY = "Ready"
    RUNNING = "Running"
    COMPLETED = "Completed"
    ABORTED = "Aborted"


LIVE = (JobStatus.READY, JobStatus.RUNNING)


@dataclass
class JobState:
    """Runtime record of one job, owned by a single simulation run."""

    spec: TaskSpec
    remaining: int = -1
    level: Optional[int] = None
    state: JobStatus = JobStatus.NOT_ARRIVED
    first_dispatch: Optional[int] = None
    completion: Optional[int] = None
    last_enqueue: int = 0
    # ticks left in the current slice while dispatched; None means unlimited
    quantum_left: Optional[int] = None

    def __post_init__(self):
        if self.remaining < 0:
            self.remaining = self.spec.burst

    @property
    def id(self) -> int:
        return self.spec.id

    @property
    def deadline(self) -> int:
        return self.spec.deadline

    @property
    def arrival(self) -> int:
        return self.spec.arrival

    @property
    def live(self) -> bool:
        return self.state in LIVE

    @property
    def edf_key(self) -> tuple:
        return (self.spec.deadline, self.spec.arrival, self.spec.id)


@dataclass(frozen=True)
class Workload:
    tasks: tuple
    name: str = "workload"
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))

    def __len__(self):
        return len(self.tasks)

    def __iter__(self):
        return iter(self.tasks)

    def total_burst(self) -> int:
        return sum(t.burst for t in self.tasks)


@dataclass(frozen=True)
class NmlfqConfig:
    """Knobs for the multi-level feedback queue policy.

    ``aging_threshold=None`` means ``10 * base_quantum * level_count``,
    re-evaluated whenever the level count changes.
    """

    base_quantum: int = MS
    min_levels: int = 2
    max_levels: int = 8
    aging_threshold: Optional[int] = None
    urgency_factor: Fraction = Fraction(1)
    admission: str = "planning"

    def __post_init__(self):
        if not isinstance(self.urgency_factor, Fraction):
            object.__setattr__(self, "urgency_factor", Fraction(self.urgency_factor))
        if self.min_levels < 1:
            raise ValueError("min_levels must be >= 1")
        if self.max_levels < self.min_levels:
            raise ValueError("max_levels must be >= min_levels")
        if self.base_quantum < 1:
            raise ValueError("base_quantum must be >= 1")
        if self.urgency_factor < 0:
            raise ValueError("urgency_factor must be >= 0")
        if self.aging_threshold is not None and self.aging_threshold < 1:
            raise ValueError("aging_threshold must be >= 1")
        if self.admission not in ("planning", "accept_all"):
            raise ValueError(f"unknown admission mode {self.admission!r}")


@dataclass(frozen=True)
class SimConfig:
    """Engine settings.

    ``abort_on_miss=None`` defers to the policy's own default (best-effort
    policies abort at the deadline, the rest run late jobs to completion).
    """

    dispatch_latency: int = 0
    context_switch_cost: int = 0
    abort_on_miss: Optional[bool] = None
    nmlfq: NmlfqConfig = field(default_factory=NmlfqConfig)
    rr_quantum: int = MS
    horizon: Optional[int] = None

    def __post_init__(self):
        if self.dispatch_latency < 0 or self.context_switch_cost < 0:
            raise ValueError("dispatch_latency and context_switch_cost must be >= 0")
        if self.rr_quantum < 1:
            raise ValueError("rr_quantum must be >= 1")

    @property
    def switch_cost(self) -> int:
        return self.dispatch_latency + self.context_switch_cost


class Violation(NamedTuple):
    task_id: Optional[int]
    rule: str


def validate_workload(w: Workload | Sequence[TaskSpec]) -> list:
    """Every broken workload rule, one :class:`Violation` per breach."""
    tasks = list(w.tasks if isinstance(w, Workload) else w)
    out = []
    if not tasks:
        out.append(Violation(None, "non-empty"))
        return out
    seen = set()
    for t in tasks:
        if t.burst < 1:
            out.append(Violation(t.id, "burst ≥ 1"))
        if t.arrival < 0:
            out.append(Violation(t.id, "arrival ≥ 0"))
        if t.deadline <= t.arrival:
            out.append(Violation(t.id, "deadline > arrival"))
        if t.value < 0:
            out.append(Violation(t.id, "value ≥ 0"))
        if t.id in seen:
            out.append(Violation(t.id, "unique id"))
        seen.add(t.id)
    for i in sorted(seen):
        if not 0 <= i < len(tasks):
            out.append(Violation(i, "dense id"))
    for a, b in zip(tasks, tasks[1:]):
        if (a.arrival, a.id) > (b.arrival, b.id):
            out.append(Violation(b.id, "sorted by (arrival, id)"))
    return out


def slack(job: JobState, now: int) -> int:
    """deadline - now - remaining; negative once the deadline is unreachable."""
    if not job.live:
        raise ValueError(f"slack of job {job.id} in state {job.state.value}")
    return job.spec.deadline - now - job.remaining
