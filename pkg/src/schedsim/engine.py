"""Event-driven uniprocessor simulation loop and its trace."""

from __future__ import annotations

import enum
import heapq
import io
import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional

from .model import JobState, JobStatus, SimConfig, Workload, validate_workload
from .policies.base import Decision, Policy

log = logging.getLogger(__name__)


class EventKind(enum.IntEnum):
    """Event kinds; the integer value is the tie-break rank at equal times."""

    COMPLETION = 0
    DEADLINE = 1
    QUANTUM_EXPIRY = 2
    ARRIVAL = 3
    LATENCY_ELAPSED = 4
    RECONFIGURE = 5


@dataclass(frozen=True, order=True)
class Event:
    time: int
    kind: EventKind
    seq: int
    job_id: Optional[int] = field(default=None, compare=False)


class TraceRecord(NamedTuple):
    time: int
    kind: str
    job_id: Optional[int]
    level: Optional[int]


class Segment(NamedTuple):
    job_id: int
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass
class Trace:
    events: list = field(default_factory=list)
    segments: list = field(default_factory=list)
    idle: int = 0
    latency_ticks: int = 0
    makespan: int = 0
    policy: str = ""
    workload: str = ""
    horizon_hit: bool = False

    @property
    def busy(self) -> int:
        return sum(s.length for s in self.segments)


class SimulationError(Exception):
    pass


class PolicyContractViolation(SimulationError):
    pass


class InvalidWorkload(SimulationError, ValueError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__("; ".join(f"task {v.task_id}: {v.rule}" for v in violations))


class HorizonExceeded(SimulationError):
    """Raised when the horizon cuts off live jobs; the partial run is attached."""

    def __init__(self, trace, states):
        self.trace = trace
        self.states = states
        live = sorted(j.id for j in states.values() if j.state is not JobStatus.COMPLETED
                      and j.state is not JobStatus.ABORTED)
        super().__init__(f"horizon {trace.makespan} reached with unfinished jobs {live}")


class Simulator:
    """One run of one policy over one workload.  Not reusable."""

    def __init__(self, workload: Workload, policy: Policy, config: Optional[SimConfig] = None):
        violations = validate_workload(workload)
        if violations:
            raise InvalidWorkload(violations)
        self.workload = workload
        self.policy = policy
        self.config = config or SimConfig()
        self.abort_on_miss = (policy.abort_on_miss if self.config.abort_on_miss is None
                              else self.config.abort_on_miss)
        self.jobs = {t.id: JobState(t) for t in workload.tasks}
        self.trace = Trace(policy=policy.name, workload=workload.name)
        self._heap = []
        self._seq = itertools.count()
        self._timers = set()
        self._cursor = 0
        self._mode = "idle"  # idle | latency | exec
        self._current = None
        self._last_ran = None
        self._level_count = policy.level_count
        self._terminal = 0

    # -- event plumbing -------------------------------------------------

    def _push(self, time, kind, job_id=None, timer=False):
        ev = Event(time, kind, next(self._seq), job_id)
        heapq.heappush(self._heap, ev)
        if timer:
            self._timers.add(ev.seq)
        return ev

    def _cancel_timers(self):
        self._timers.clear()

    def _record(self, t, kind, job_id=None):
        level = self.policy.level_of(job_id) if job_id is not None else None
        self.trace.events.append(TraceRecord(t, kind, job_id, level))

    # -- time accounting ------------------------------------------------

    def _advance(self, t):
        span = t - self._cursor
        if span < 0:
            raise SimulationError(f"clock moved backwards to {t}")
        if span == 0:
            return
        if self._mode == "idle":
            self.trace.idle += span
        elif self._mode == "latency":
            self.trace.latency_ticks += span
        else:
            job = self.jobs[self._current]
            job.remaining -= span
            if job.quantum_left is not None:
                job.quantum_left -= span
            segs = self.trace.segments
            if segs and segs[-1].job_id == job.id and segs[-1].end == self._cursor:
                segs[-1] = Segment(job.id, segs[-1].start, t)
            else:
                segs.append(Segment(job.id, self._cursor, t))
        self._cursor = t

    # -- job transitions ------------------------------------------------

    def _start_exec(self, job, t):
        self._mode = "exec"
        self._current = job.id
        self._last_ran = job.id
        if job.first_dispatch is None:
            job.first_dispatch = t
        self._arm(job, t)

    def _arm(self, job, t):
        self._cancel_timers()
        q = job.quantum_left
        if q is not None and q < job.remaining:
            self._push(t + q, EventKind.QUANTUM_EXPIRY, job.id, timer=True)
        else:
            self._push(t + job.remaining, EventKind.COMPLETION, job.id, timer=True)

    def _release_cpu(self):
        self._cancel_timers()
        self._mode = "idle"
        self._current = None

    def _finish(self, job, status, t):
        job.state = status
        job.quantum_left = None
        if status is JobStatus.COMPLETED:
            job.completion = t
        if self._current == job.id:
            self._release_cpu()
        self._terminal += 1

    def _abort(self, job, t):
        self._finish(job, JobStatus.ABORTED, t)
        self._record(t, "Abort", job.id)
        self.policy.on_abort(job, t)

    def _handle(self, ev: Event) -> bool:
        """Apply one event; True when it makes ``t`` a scheduling point."""
        t = ev.time
        job = self.jobs.get(ev.job_id)
        kind = ev.kind
        if kind in (EventKind.COMPLETION, EventKind.QUANTUM_EXPIRY, EventKind.LATENCY_ELAPSED):
            if ev.seq not in self._timers:
                return False
            self._timers.discard(ev.seq)
        if kind is EventKind.ARRIVAL:
            job.state = JobStatus.READY
            job.last_enqueue = t
            self.policy.on_arrival(job, t)
            self._record(t, "Arrival", job.id)
            return True
        if kind is EventKind.COMPLETION:
            assert job.remaining == 0, (job.id, job.remaining)
            self._finish(job, JobStatus.COMPLETED, t)
            self._record(t, "Completion", job.id)
            self.policy.on_completion(job, t)
            return True
        if kind is EventKind.QUANTUM_EXPIRY:
            self._release_cpu()
            job.state = JobStatus.READY
            job.quantum_left = None
            self.policy.on_quantum_expiry(job, t)
            self._record(t, "QuantumExpiry", job.id)
            return True
        if kind is EventKind.LATENCY_ELAPSED:
            self._record(t, "LatencyElapsed", job.id)
            self._start_exec(job, t)
            return False
        if kind is EventKind.DEADLINE:
            if job.live and job.remaining > 0:
                self._abort(job, t)
                return True
            return False
        raise SimulationError(f"unhandled event {ev}")

    def _note_reconfigure(self, t):
        lc = self.policy.level_count
        if lc != self._level_count:
            self._level_count = lc
            self.trace.events.append(TraceRecord(t, "Reconfigure", None, lc))

    # -- scheduling -----------------------------------------------------

    def _schedule(self, t):
        ready = {j.id: j for j in self.jobs.values() if j.live}
        decision = self.policy.select(ready, t) or Decision(None)
        self._record(t, "Select", decision.job_id)
        for jid in sorted(decision.aborts):
            if jid not in ready:
                raise PolicyContractViolation(f"{self.policy.name} aborted non-ready job {jid} at {t}")
            self._abort(self.jobs[jid], t)
        chosen = decision.job_id
        if chosen is not None and (chosen not in ready or chosen in decision.aborts):
            raise PolicyContractViolation(f"{self.policy.name} selected non-ready job {chosen} at {t}")
        if decision.quantum is not None and decision.quantum < 1:
            raise PolicyContractViolation(f"{self.policy.name} granted quantum {decision.quantum}")

        if chosen is not None and chosen == self._current:
            job = self.jobs[chosen]
            if decision.quantum is not None:
                job.quantum_left = decision.quantum
                if self._mode == "exec":
                    self._arm(job, t)
            return

        if self._current is not None:
            prev = self.jobs[self._current]
            prev.state = JobStatus.READY
            prev.quantum_left = None
            self._record(t, "Preempt", prev.id)
            self._release_cpu()
        if chosen is None:
            return
        job = self.jobs[chosen]
        job.state = JobStatus.RUNNING
        job.quantum_left = decision.quantum
        cost = self.config.switch_cost if chosen != self._last_ran else 0
        if cost:
            self._mode = "latency"
            self._current = chosen
            self._push(t + cost, EventKind.LATENCY_ELAPSED, chosen, timer=True)
        else:
            self._start_exec(job, t)

    # -- main loop ------------------------------------------------------

    def run(self):
        for task in self.workload.tasks:
            self._push(task.arrival, EventKind.ARRIVAL, task.id)
        if self.abort_on_miss:
            for task in self.workload.tasks:
                self._push(task.deadline, EventKind.DEADLINE, task.id)
        horizon = self.config.horizon
        n = len(self.jobs)
        while self._terminal < n:
            if not self._heap:
                live = sorted(j.id for j in self.jobs.values() if not _terminal(j))
                raise PolicyContractViolation(
                    f"{self.policy.name} left jobs {live} ready with nothing scheduled")
            t = self._heap[0].time
            if horizon is not None and t > horizon:
                self._advance(horizon)
                self.trace.makespan = horizon
                self.trace.horizon_hit = True
                raise HorizonExceeded(self.trace, self.jobs)
            self._advance(t)
            point = False
            while self._heap and self._heap[0].time == t:
                ev = heapq.heappop(self._heap)
                point |= self._handle(ev)
                self._note_reconfigure(t)
            if point:
                self._schedule(t)
                self._note_reconfigure(t)
        self.trace.makespan = self._cursor
        return self.trace, self.jobs


def _terminal(j: JobState) -> bool:
    return j.state in (JobStatus.COMPLETED, JobStatus.ABORTED)


def run(workload: Workload, policy, config: Optional[SimConfig] = None):
    """Simulate ``workload`` under ``policy`` (a :class:`Policy` or a registered name).

    Returns ``(trace, states)`` where ``states`` maps job id to its final
    :class:`JobState`.
    """
    config = config or SimConfig()
    if isinstance(policy, str):
        from .policies import make_policy

        policy = make_policy(policy, config)
    return Simulator(workload, policy, config).run()


def scheduling_points(trace: Trace) -> list:
    """Times at which the policy was consulted, in order."""
    return [r.time for r in trace.events if r.kind == "Select"]


def verify_trace(trace: Trace, states) -> list:
    """Structural problems with a finished trace; empty when it is sound."""
    problems = []
    prev_end = None
    for seg in trace.segments:
        if seg.end <= seg.start:
            problems.append(f"empty segment {seg}")
        if prev_end is not None and seg.start < prev_end:
            problems.append(f"overlapping segment {seg}")
        prev_end = seg.end
        job = states[seg.job_id]
        if seg.start < job.spec.arrival:
            problems.append(f"job {seg.job_id} ran before arrival at {seg.start}")
    executed = {}
    for seg in trace.segments:
        executed[seg.job_id] = executed.get(seg.job_id, 0) + seg.length
    for jid, job in states.items():
        ran = executed.get(jid, 0)
        if job.state is JobStatus.COMPLETED:
            if ran != job.spec.burst:
                problems.append(f"job {jid} completed after {ran} of {job.spec.burst} ticks")
            if job.completion is None or job.remaining != 0:
                problems.append(f"job {jid} completed without completion record")
        elif ran >= job.spec.burst:
            problems.append(f"unfinished job {jid} ran its full burst")
        if job.first_dispatch is not None and job.first_dispatch < job.spec.arrival:
            problems.append(f"job {jid} dispatched before arrival")
        if ran != job.spec.burst - job.remaining:
            problems.append(f"job {jid} remaining {job.remaining} disagrees with {ran} executed")
    total = trace.busy + trace.idle + trace.latency_ticks
    if total != trace.makespan:
        problems.append(f"busy+idle+latency={total} != makespan {trace.makespan}")
    times = [r.time for r in trace.events]
    if times != sorted(times):
        problems.append("trace events out of time order")
    return problems


# -- serialization --------------------------------------------------------

def _cell(v):
    return "" if v is None else str(v)


def format_trace(trace: Trace) -> str:
    buf = io.StringIO()
    for key in ("policy", "workload", "makespan", "idle", "latency_ticks", "horizon_hit"):
        value = getattr(trace, key)
        if isinstance(value, bool):
            value = int(value)
        buf.write(f"# {key}={value}\n")
    buf.write(f"# busy={trace.busy}\n")
    buf.write("time,kind,job_id,level\n")
    for r in trace.events:
        buf.write(f"{r.time},{r.kind},{_cell(r.job_id)},{_cell(r.level)}\n")
    buf.write("\njob_id,start,end\n")
    for s in trace.segments:
        buf.write(f"{s.job_id},{s.start},{s.end}\n")
    return buf.getvalue()


def write_trace(trace: Trace, path) -> None:
    Path(path).write_text(format_trace(trace), encoding="utf-8", newline="\n")


def parse_trace(text: str) -> Trace:
    trace = Trace()
    lines = text.split("\n")
    i = 0
    while lines[i].startswith("#"):
        key, _, value = lines[i][2:].partition("=")
        if key in ("makespan", "idle", "latency_ticks"):
            setattr(trace, key, int(value))
        elif key == "horizon_hit":
            trace.horizon_hit = bool(int(value))
        elif key in ("policy", "workload"):
            setattr(trace, key, value)
        i += 1
    assert lines[i] == "time,kind,job_id,level"
    i += 1
    opt = lambda s: int(s) if s else None  # noqa: E731
    while lines[i]:
        time, kind, job_id, level = lines[i].split(",")
        trace.events.append(TraceRecord(int(time), kind, opt(job_id), opt(level)))
        i += 1
    i += 1
    assert lines[i] == "job_id,start,end"
    for line in lines[i + 1:]:
        if line:
            trace.segments.append(Segment(*map(int, line.split(","))))
    return trace


def read_trace(path) -> Trace:
    return parse_trace(Path(path).read_text(encoding="utf-8"))
