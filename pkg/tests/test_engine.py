import pytest
from hypothesis import given, strategies as st

from oracles import tick_sim
from strategies import as_rows, workloads

from conftest import make_workload
from schedsim import (POLICY_NAMES, HorizonExceeded, InvalidWorkload, JobStatus,
                      PolicyContractViolation, SimConfig, TaskSpec, Workload, format_trace,
                      read_trace, run, scheduling_points, verify_trace, write_trace)
from schedsim.engine import Event, EventKind, parse_trace
from schedsim.policies import Decision, Policy

SINGLE_JOB = make_workload((0, 3000, 3000), name="single_job")


@pytest.mark.parametrize("policy", POLICY_NAMES)
def test_single_job_completes_on_time(policy):
    trace, states = run(SINGLE_JOB, policy)
    job = states[0]
    assert job.state is JobStatus.COMPLETED and job.completion == 3000
    points = scheduling_points(trace)
    assert points[0] == 0 and points[-1] == 3000
    if policy not in ("rr", "nmlfq"):
        assert points == [0, 3000]


def test_dispatch_latency_makes_single_job_miss():
    trace, states = run(SINGLE_JOB, "edf", SimConfig(dispatch_latency=1000))
    job = states[0]
    assert job.first_dispatch == 1000
    assert job.completion == 4000 > job.spec.deadline
    assert trace.latency_ticks == 1000 and trace.makespan == 4000
    assert scheduling_points(trace) == [0, 4000]


def test_context_switch_cost_adds_to_latency():
    trace, states = run(SINGLE_JOB, "edf", SimConfig(dispatch_latency=600, context_switch_cost=400))
    assert states[0].completion == 4000


def test_edf_two_jobs_matches_tick_reference():
    w = make_workload((0, 2000, 8000), (0, 2000, 4000))
    trace, _ = run(w, "edf")
    expected, _, _ = tick_sim(as_rows(w), "edf")
    assert [tuple(s) for s in trace.segments] == expected == [(1, 0, 2000), (0, 2000, 4000)]
    assert scheduling_points(trace) == [0, 2000, 4000]


def test_latency_only_on_switch_not_resume():
    # A is preempted by B, then resumes: two switches into new jobs and one back to A
    w = make_workload((0, 3000, 20000), (1000, 500, 2500))
    trace, states = run(w, "edf", SimConfig(dispatch_latency=100))
    assert [tuple(s) for s in trace.segments] == [(0, 100, 1000), (1, 1100, 1600), (0, 1700, 3800)]
    assert trace.latency_ticks == 300
    assert not verify_trace(trace, states)


def test_same_job_after_idle_pays_no_latency_when_it_never_left():
    # RR with one job: quantum expiry then reselection of the same job is not a switch
    trace, states = run(SINGLE_JOB, "rr", SimConfig(dispatch_latency=50, rr_quantum=1000))
    assert trace.latency_ticks == 50
    assert states[0].completion == 3050


def test_event_order():
    a = Event(5, EventKind.ARRIVAL, 0)
    c = Event(5, EventKind.COMPLETION, 9)
    q = Event(5, EventKind.QUANTUM_EXPIRY, 3)
    lat = Event(5, EventKind.LATENCY_ELAPSED, 1)
    r = Event(5, EventKind.RECONFIGURE, 2)
    assert sorted([r, lat, a, q, c]) == [c, q, a, lat, r]
    assert Event(4, EventKind.RECONFIGURE, 7) < c


def test_completion_at_quantum_end_counts_as_completion():
    w = make_workload((0, 1000, 5000))
    trace, states = run(w, "rr", SimConfig(rr_quantum=1000))
    kinds = [r.kind for r in trace.events]
    assert "QuantumExpiry" not in kinds and states[0].completion == 1000


def test_invalid_workload_rejected():
    with pytest.raises(InvalidWorkload):
        run(Workload((TaskSpec(0, 0, 0, 5),)), "edf")


class _Rogue(Policy):
    name = "rogue"

    def __init__(self, decision):
        self.decision = decision

    def select(self, ready, now):
        return self.decision


@pytest.mark.parametrize("decision", [Decision(7), Decision(0, quantum=0), Decision(0, aborts=frozenset({5}))])
def test_policy_contract_violations(decision):
    with pytest.raises(PolicyContractViolation):
        run(SINGLE_JOB, _Rogue(decision))


def test_idle_policy_with_nothing_pending_is_a_violation():
    with pytest.raises(PolicyContractViolation):
        run(SINGLE_JOB, _Rogue(None))


def test_horizon_returns_partial_run():
    w = make_workload((0, 3000, 3000), (0, 3000, 9000))
    with pytest.raises(HorizonExceeded) as info:
        run(w, "edf", SimConfig(horizon=4000))
    trace, states = info.value.trace, info.value.states
    assert trace.horizon_hit and trace.makespan == 4000
    assert states[0].state is JobStatus.COMPLETED
    assert states[1].state is JobStatus.RUNNING and states[1].remaining == 2000
    assert not verify_trace(trace, states)


def test_abort_on_miss_override():
    w = make_workload((0, 3000, 3000), (0, 3000, 3100))
    _, states = run(w, "edf", SimConfig(abort_on_miss=True))
    assert states[1].state is JobStatus.ABORTED
    _, states = run(w, "edf")
    assert states[1].state is JobStatus.COMPLETED and states[1].completion == 6000


def test_trace_roundtrip(tmp_path):
    trace, _ = run(make_workload((0, 2500, 9000), (0, 2500, 9000)), "rr")
    write_trace(trace, tmp_path / "t.csv")
    back = read_trace(tmp_path / "t.csv")
    assert back == trace
    assert format_trace(parse_trace(format_trace(trace))) == format_trace(trace)


def _lifetimes(trace, states):
    end = {}
    for r in trace.events:
        if r.kind in ("Completion", "Abort"):
            end[r.job_id] = r.time
    return {jid: (j.spec.arrival, end[jid]) for jid, j in states.items()}


def _idle_gaps(trace):
    gaps, cursor = [], 0
    for s in trace.segments:
        if s.start > cursor:
            gaps.append((cursor, s.start))
        cursor = s.end
    if trace.makespan > cursor:
        gaps.append((cursor, trace.makespan))
    return gaps


@pytest.mark.parametrize("policy", POLICY_NAMES)
@given(w=workloads(values=True))
def test_trace_invariants_all_policies(policy, w):
    trace, states = run(w, policy)
    assert verify_trace(trace, states) == []
    assert trace.busy + trace.idle + trace.latency_ticks == trace.makespan
    assert all(not j.live for j in states.values())
    # work conservation: no job is ready during an idle gap
    life = _lifetimes(trace, states)
    for a, b in _idle_gaps(trace):
        for start, end in life.values():
            assert not (start < b and end > a and max(start, a) < min(end, b))


@pytest.mark.parametrize("policy", POLICY_NAMES)
@given(w=workloads(values=True), latency=st.integers(0, 5))
def test_determinism_and_conservation_with_latency(policy, w, latency):
    config = SimConfig(dispatch_latency=latency)
    first = format_trace(run(w, policy, config)[0])
    assert format_trace(run(w, policy, config)[0]) == first
    trace, states = run(w, policy, config)
    assert verify_trace(trace, states) == []


@pytest.mark.parametrize("policy", ["edf", "fcfs", "rr"])
@given(w=workloads(), quantum=st.integers(1, 6))
def test_matches_tick_reference(policy, w, quantum):
    trace, states = run(w, policy, SimConfig(rr_quantum=quantum))
    segments, first, done = tick_sim(as_rows(w), policy, quantum)
    assert [tuple(s) for s in trace.segments] == segments
    assert {j: s.first_dispatch for j, s in states.items()} == first
    assert {j: s.completion for j, s in states.items()} == done


@given(w=workloads())
def test_scheduling_points_cover_arrivals_and_completions(w):
    trace, states = run(w, "rr", SimConfig(rr_quantum=3))
    points = set(scheduling_points(trace))
    for j in states.values():
        assert j.spec.arrival in points and j.completion in points
    for r in trace.events:
        if r.kind == "QuantumExpiry":
            assert r.time in points
