"""Multi-level feedback queue with dynamic levels, deadline urgency and admission.

Ready jobs live in a :class:`ReadyTable`: level 0 is the top queue and is kept
in EDF order, lower levels are FIFO.  New arrivals enter level 0; a job that
uses up its level's quantum drops one level.  Two feedback paths move jobs
back up:

* urgency: a job whose slack falls below ``urgency_factor * remaining`` is
  moved straight to level 0;
* aging: a job that has waited ``aging_threshold`` ticks at its level moves
  up one level.

The number of levels tracks the ready population,
``clamp(ceil(log2(n + 1)), min_levels, max_levels)``, and level ``k`` gets a
quantum of ``base_quantum * 2**k``.

With ``admission="planning"`` an arriving job is accepted only if it and
every job accepted before it can still meet their deadlines; rejected jobs
are aborted on arrival.  To keep that promise the dispatcher never grants a
slice that would push another admitted job past its deadline, and falls back
to the earliest-deadline job when the MLFQ choice is unsafe.
``admission="accept_all"`` admits everything and skips the guard.
"""

from __future__ import annotations

import bisect
from typing import Iterable, Mapping, NamedTuple, Optional

from .feasibility import demand_feasible, max_safe_run
from .model import JobState, NmlfqConfig, slack
from .policies.base import Decision, Policy, running_job

__all__ = [
    "Admission", "DuplicateJob", "EmptyTable", "NMLFQ", "NmlfqConfig", "ReadyTable",
    "StaleIndex", "planning_admit", "reconfigure",
]


class DuplicateJob(KeyError):
    pass


class EmptyTable(LookupError):
    pass


class StaleIndex(LookupError):
    pass


def reconfigure(n_ready: int, cfg: NmlfqConfig = NmlfqConfig()) -> tuple:
    """Level count and per-level quanta for ``n_ready`` ready jobs."""
    # int.bit_length(n) == ceil(log2(n + 1)) for n >= 0
    levels = min(max(int(n_ready).bit_length(), cfg.min_levels), cfg.max_levels)
    return levels, tuple(cfg.base_quantum << k for k in range(levels))


class ReadyTable:
    """Priority levels of ready job ids plus an id -> level index.

    Mutating methods keep three things in step: the level lists, the index,
    and ``JobState.level`` of the jobs involved.
    """

    def __init__(self, level_count: int = 2):
        if level_count < 1:
            raise ValueError("level_count must be >= 1")
        self.levels = [[] for _ in range(level_count)]
        self.index = {}
        self.jobs = {}

    @property
    def level_count(self) -> int:
        return len(self.levels)

    def __len__(self):
        return len(self.index)

    def __contains__(self, job_id):
        return job_id in self.index

    def __repr__(self):
        return f"ReadyTable({self.levels})"

    def _key(self, job_id):
        return self.jobs[job_id].edf_key

    def _place(self, job: JobState, level: int, now: int, front: bool = False):
        self.jobs[job.id] = job
        self.index[job.id] = level
        job.level = level
        job.last_enqueue = now
        queue = self.levels[level]
        if level == 0:
            bisect.insort(queue, job.id, key=self._key)
        elif front:
            queue.insert(0, job.id)
        else:
            queue.append(job.id)

    def _take(self, job_id: int) -> JobState:
        level = self.index.pop(job_id)
        self.levels[level].remove(job_id)
        return self.jobs.pop(job_id)

    def insert_into_pqueue(self, job: JobState, now: int) -> None:
        """Enqueue a newly ready job at the top level."""
        if job.id in self.index:
            raise DuplicateJob(job.id)
        self._place(job, 0, now)

    def add_at_front(self, job: JobState, now: int) -> None:
        """Move ``job`` (present or not) to level 0, in deadline order."""
        if job.id in self.index:
            self._take(job.id)
        self._place(job, 0, now)

    def remove(self, job_id: int) -> JobState:
        job = self._take(job_id)
        job.level = None
        return job

    def remove_at_end(self, index: int) -> int:
        """Drop the lowest-priority job: the tail of the lowest non-empty level.

        ``index`` must name that job; a mismatch means the caller's view is stale.
        """
        for queue in reversed(self.levels):
            if queue:
                tail = queue[-1]
                break
        else:
            raise EmptyTable("remove_at_end on an empty table")
        if index != tail:
            raise StaleIndex(f"expected tail {tail}, got {index}")
        self.remove(tail)
        return tail

    def move(self, job_id: int, level: int, now: int, front: bool = False) -> None:
        job = self._take(job_id)
        self._place(job, level, now, front)

    def resize(self, level_count: int, now: int) -> None:
        """Change the number of levels; jobs below the new bottom are clamped into it."""
        if level_count < 1:
            raise ValueError("level_count must be >= 1")
        if level_count >= len(self.levels):
            self.levels.extend([] for _ in range(level_count - len(self.levels)))
            return
        spill = [jid for queue in self.levels[level_count:] for jid in queue]
        del self.levels[level_count:]
        for jid in spill:
            job = self.jobs[jid]
            del self.index[jid]
            self._place(job, level_count - 1, job.last_enqueue)

    def head(self) -> tuple:
        """``(job_id, level)`` at the front of the highest non-empty level."""
        for level, queue in enumerate(self.levels):
            if queue:
                return queue[0], level
        raise EmptyTable("head of an empty table")

    def check(self) -> list:
        """Invariant breaches, as messages; empty when consistent."""
        problems = []
        seen = {}
        for level, queue in enumerate(self.levels):
            for jid in queue:
                if jid in seen:
                    problems.append(f"job {jid} at levels {seen[jid]} and {level}")
                seen[jid] = level
        if seen != self.index:
            problems.append(f"index {self.index} disagrees with levels {seen}")
        if set(self.jobs) != set(self.index):
            problems.append("job map disagrees with index")
        for jid, level in self.index.items():
            if not 0 <= level < self.level_count:
                problems.append(f"job {jid} at level {level} outside [0, {self.level_count})")
            if jid in self.jobs and self.jobs[jid].level != level:
                problems.append(f"job {jid} thinks it is at level {self.jobs[jid].level}")
        keys = [self._key(j) for j in self.levels[0] if j in self.jobs]
        if keys != sorted(keys):
            problems.append("level 0 out of EDF order")
        return problems


class Admission(NamedTuple):
    accepted: bool
    reason: str = ""


def planning_admit(rt: ReadyTable, job: JobState, now: int,
                   cfg: NmlfqConfig = NmlfqConfig()) -> Admission:
    """Accept ``job`` only if every admitted live job can still make its deadline."""
    if cfg.admission == "accept_all":
        return Admission(True)
    if demand_feasible([*rt.jobs.values(), job], now):
        return Admission(True)
    return Admission(False, "admitted set would miss a deadline")


class NMLFQ(Policy):
    name = "nmlfq"

    def __init__(self, cfg: NmlfqConfig = NmlfqConfig()):
        self.cfg = cfg
        levels, self.quanta = reconfigure(0, cfg)
        self.table = ReadyTable(levels)
        self._rejected = set()
        self._truncated = set()

    @property
    def level_count(self) -> int:
        return self.table.level_count

    @property
    def aging_threshold(self) -> int:
        if self.cfg.aging_threshold is not None:
            return self.cfg.aging_threshold
        return 10 * self.cfg.base_quantum * self.table.level_count

    def level_of(self, job_id):
        return self.table.index.get(job_id)

    def _reconfigure(self, now):
        levels, self.quanta = reconfigure(len(self.table), self.cfg)
        self.table.resize(levels, now)

    # -- engine callbacks ------------------------------------------------

    def on_arrival(self, job, now):
        if not planning_admit(self.table, job, now, self.cfg).accepted:
            self._rejected.add(job.id)
            return
        self.table.insert_into_pqueue(job, now)
        self._reconfigure(now)

    def on_completion(self, job, now):
        self._truncated.discard(job.id)
        if job.id in self.table:
            self.table.remove(job.id)
            self._reconfigure(now)

    on_abort = on_completion

    def on_quantum_expiry(self, job, now):
        if job.id in self._truncated:
            # cut short by the deadline guard, not by using up its quantum
            self._truncated.discard(job.id)
            return
        bottom = self.table.level_count - 1
        self.table.move(job.id, min(self.table.index[job.id] + 1, bottom), now)

    # -- dispatch --------------------------------------------------------

    def promote(self, now: int) -> None:
        """Apply urgency promotions, then aging, to every queued job."""
        factor = self.cfg.urgency_factor
        for level in range(1, self.table.level_count):
            for jid in list(self.table.levels[level]):
                job = self.table.jobs[jid]
                if slack(job, now) < factor * job.remaining:
                    self.table.add_at_front(job, now)
        threshold = self.aging_threshold
        snapshot = [(jid, level) for level, queue in enumerate(self.table.levels)
                    for jid in queue if level > 0]
        for jid, level in snapshot:
            if now - self.table.jobs[jid].last_enqueue >= threshold:
                self.table.move(jid, level - 1, now)

    def select(self, ready: Mapping[int, JobState], now: int):
        aborts = frozenset(self._rejected & ready.keys())
        self._rejected.clear()
        if not self.table:
            return Decision(None, None, aborts)
        self.promote(now)
        current = running_job(ready)
        head_id, head_level = self.table.head()
        if current is not None and current.id in self.table and self.table.index[current.id] <= head_level:
            choice, quantum = current, None
        else:
            choice, quantum = self.table.jobs[head_id], self.quanta[head_level]
        truncated = False
        if self.cfg.admission == "planning":
            choice, quantum, truncated = self._guard(choice, current, quantum, now)
        continuing = current is not None and choice.id == current.id
        if truncated:
            self._truncated = {choice.id}
        elif not (continuing and quantum is None):
            self._truncated = set()
        return Decision(choice.id, quantum, aborts)

    def _guard(self, choice, current, quantum, now):
        jobs = self.table.jobs.values()
        limit = max_safe_run(choice, jobs, now)
        if limit is None:
            return choice, quantum, False
        if limit >= 1:
            continuing = current is not None and choice.id == current.id
            granted = choice.quantum_left if continuing and quantum is None else quantum
            if granted is None or granted > limit:
                return choice, limit, True
            return choice, quantum, False
        edf_head = min(jobs, key=lambda j: j.edf_key)
        if current is not None and edf_head.id == current.id:
            return edf_head, None, False
        return edf_head, self.quanta[self.table.index[edf_head.id]], False
