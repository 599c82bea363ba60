"""Per-job and aggregate metrics from a finished run, and cross-policy comparison.

All arithmetic is exact (:class:`fractions.Fraction`); conversion to decimal
happens only when formatting.
"""

from __future__ import annotations

import io
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .engine import Trace
from .model import JobStatus


class IncompleteTrace(ValueError):
    pass


class MismatchedSuites(ValueError):
    pass


@dataclass(frozen=True)
class JobMetrics:
    job_id: int
    arrival: int
    burst: int
    deadline: int
    value: Fraction
    state: str
    first_dispatch: Optional[int]
    completion: Optional[int]
    response: Optional[int]
    turnaround: Optional[int]
    waiting: Optional[int]
    met_deadline: bool
    value_accrued: Fraction


@dataclass(frozen=True)
class MetricsReport:
    per_job: tuple
    cpu_utilization: Fraction
    overall_turnaround: int
    avg_turnaround: Optional[Fraction]
    avg_waiting: Optional[Fraction]
    avg_response: Optional[Fraction]
    miss_ratio: Fraction
    total_value: Fraction
    policy: str
    workload: str
    makespan: int
    misses: int

    @property
    def n_jobs(self) -> int:
        return len(self.per_job)

    @property
    def response_samples(self) -> int:
        return sum(1 for m in self.per_job if m.response is not None)

    @property
    def completed(self) -> int:
        return sum(1 for m in self.per_job if m.turnaround is not None)


def _mean(xs):
    return Fraction(sum(xs), len(xs)) if xs else None


def compute(trace: Trace, states) -> MetricsReport:
    """Metrics for one run.  ``states`` maps job id to final ``JobState``."""
    if trace.segments and trace.segments[-1].end > trace.makespan:
        raise IncompleteTrace(f"segment ends at {trace.segments[-1].end} after makespan {trace.makespan}")
    unknown = {s.job_id for s in trace.segments} - set(states)
    if unknown:
        raise IncompleteTrace(f"trace mentions unknown jobs {sorted(unknown)}")
    if not trace.horizon_hit and any(j.live or j.state is JobStatus.NOT_ARRIVED for j in states.values()):
        raise IncompleteTrace("jobs still live in a run that did not hit its horizon")

    per_job = []
    for jid in sorted(states):
        job = states[jid]
        spec = job.spec
        response = None if job.first_dispatch is None else job.first_dispatch - spec.arrival
        turnaround = waiting = None
        met = False
        if job.state is JobStatus.COMPLETED:
            turnaround = job.completion - spec.arrival
            waiting = turnaround - spec.burst
            met = job.completion <= spec.deadline
        per_job.append(JobMetrics(
            job_id=jid, arrival=spec.arrival, burst=spec.burst, deadline=spec.deadline,
            value=spec.value, state=job.state.value, first_dispatch=job.first_dispatch,
            completion=job.completion, response=response, turnaround=turnaround,
            waiting=waiting, met_deadline=met,
            value_accrued=spec.value if met else Fraction(0),
        ))

    completed = [m for m in per_job if m.turnaround is not None]
    misses = sum(1 for m in per_job if not m.met_deadline)
    busy = trace.busy
    return MetricsReport(
        per_job=tuple(per_job),
        cpu_utilization=Fraction(busy, trace.makespan) if trace.makespan else Fraction(0),
        overall_turnaround=(max(m.completion for m in completed) - min(m.arrival for m in per_job)
                            if completed else 0),
        avg_turnaround=_mean([m.turnaround for m in completed]),
        avg_waiting=_mean([m.waiting for m in completed]),
        avg_response=_mean([m.response for m in per_job if m.response is not None]),
        miss_ratio=Fraction(misses, len(per_job)),
        total_value=sum((m.value_accrued for m in per_job), Fraction(0)),
        policy=trace.policy,
        workload=trace.workload,
        makespan=trace.makespan,
        misses=misses,
    )


# -- comparison -------------------------------------------------------------

@dataclass(frozen=True)
class PolicyRow:
    workload: str
    policy: str
    avg_response: Optional[Fraction]
    avg_turnaround: Optional[Fraction]
    avg_waiting: Optional[Fraction]
    cpu_utilization: Fraction
    miss_ratio: Fraction
    total_value: Fraction
    response_samples: int
    reduction: Optional[Fraction] = None


@dataclass
class ComparisonTable:
    reference: str
    policies: list
    workloads: list
    rows: list = field(default_factory=list)
    aggregate: list = field(default_factory=list)
    response_min: dict = field(default_factory=dict)
    response_max: dict = field(default_factory=dict)

    def aggregate_row(self, policy: str) -> PolicyRow:
        return next(r for r in self.aggregate if r.policy == policy)

    def reduction(self, policy: str, workload: Optional[str] = None) -> Optional[Fraction]:
        """Relative response-time reduction of the reference vs ``policy``."""
        if workload is None:
            return self.aggregate_row(policy).reduction
        return next(r.reduction for r in self.rows if r.policy == policy and r.workload == workload)


def response_reduction(reference: Optional[Fraction], other: Optional[Fraction]) -> Optional[Fraction]:
    """``(other - reference) / other``; ``None`` when either side has no samples."""
    if reference is None or other is None:
        return None
    if other == 0:
        return Fraction(0) if reference == 0 else None
    return (other - reference) / other


def _weighted(rows, attr, weight):
    num = Fraction(0)
    den = 0
    for r in rows:
        v = getattr(r, attr)
        w = weight(r)
        if v is not None and w:
            num += v * w
            den += w
    return num / den if den else None


def compare(reports: Sequence[MetricsReport], reference: Optional[str] = None) -> ComparisonTable:
    """Line up reports by workload and policy.

    Every workload must carry exactly the same set of policy labels.
    ``reference`` defaults to ``"nmlfq"`` when present, else the first policy.
    Aggregates weight each case's averages by its number of samples, which
    makes them the mean over all samples pooled across cases.
    """
    if not reports:
        raise MismatchedSuites("nothing to compare")
    by_case = defaultdict(dict)
    policies = []
    workloads = []
    for r in reports:
        if r.policy in by_case[r.workload]:
            raise MismatchedSuites(f"duplicate report for {r.workload}/{r.policy}")
        by_case[r.workload][r.policy] = r
        if r.policy not in policies:
            policies.append(r.policy)
        if r.workload not in workloads:
            workloads.append(r.workload)
    for w in workloads:
        if set(by_case[w]) != set(policies):
            missing = sorted(set(policies) - set(by_case[w]))
            raise MismatchedSuites(f"workload {w} lacks policies {missing}")
    if reference is None:
        reference = "nmlfq" if "nmlfq" in policies else policies[0]
    if reference not in policies:
        raise MismatchedSuites(f"reference policy {reference} not among {policies}")

    table = ComparisonTable(reference=reference, policies=policies, workloads=workloads)
    for w in workloads:
        ref = by_case[w][reference].avg_response
        for p in policies:
            r = by_case[w][p]
            table.rows.append(PolicyRow(
                workload=w, policy=p, avg_response=r.avg_response,
                avg_turnaround=r.avg_turnaround, avg_waiting=r.avg_waiting,
                cpu_utilization=r.cpu_utilization, miss_ratio=r.miss_ratio,
                total_value=r.total_value, response_samples=r.response_samples,
                reduction=response_reduction(ref, r.avg_response),
            ))
    agg = {}
    for p in policies:
        rs = [by_case[w][p] for w in workloads]
        agg[p] = PolicyRow(
            workload="ALL", policy=p,
            avg_response=_weighted(rs, "avg_response", lambda r: r.response_samples),
            avg_turnaround=_weighted(rs, "avg_turnaround", lambda r: r.completed),
            avg_waiting=_weighted(rs, "avg_waiting", lambda r: r.completed),
            cpu_utilization=_weighted(rs, "cpu_utilization", lambda r: r.makespan) or Fraction(0),
            miss_ratio=Fraction(sum(r.misses for r in rs), sum(r.n_jobs for r in rs)),
            total_value=sum((r.total_value for r in rs), Fraction(0)),
            response_samples=sum(r.response_samples for r in rs),
        )
        samples = [r.avg_response for r in rs if r.avg_response is not None]
        table.response_min[p] = min(samples) if samples else None
        table.response_max[p] = max(samples) if samples else None
    for p in policies:
        row = agg[p]
        table.aggregate.append(PolicyRow(**{**row.__dict__, "reduction": response_reduction(
            agg[reference].avg_response, row.avg_response)}))
    return table


# -- output -----------------------------------------------------------------

def fmt(x, places: int = 6) -> str:
    """Decimal rendering of an exact value; blank for ``None``."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{float(x):.{places}f}"
    return str(x)


JOB_COLUMNS = ("job_id", "arrival", "burst", "deadline", "value", "state", "first_dispatch",
               "completion", "response", "turnaround", "waiting", "met_deadline", "value_accrued")
SUMMARY_FIELDS = ("policy", "workload", "makespan", "cpu_utilization", "overall_turnaround",
                  "avg_turnaround", "avg_waiting", "avg_response", "miss_ratio", "misses",
                  "total_value")


def format_metrics(report: MetricsReport) -> str:
    buf = io.StringIO()
    buf.write(",".join(JOB_COLUMNS) + "\n")
    for m in report.per_job:
        buf.write(",".join(fmt(getattr(m, c)) for c in JOB_COLUMNS) + "\n")
    buf.write("#summary\n")
    for key in SUMMARY_FIELDS:
        buf.write(f"{key},{fmt(getattr(report, key))}\n")
    return buf.getvalue()


def write_metrics(report: MetricsReport, path) -> None:
    Path(path).write_text(format_metrics(report), encoding="utf-8", newline="\n")


def format_summary(report: MetricsReport) -> str:
    lines = [f"policy {report.policy} on {report.workload}"]
    for key in SUMMARY_FIELDS[2:]:
        lines.append(f"  {key:<20} {fmt(getattr(report, key), 3)}")
    return "\n".join(lines) + "\n"


ROW_COLUMNS = ("workload", "policy", "avg_response", "avg_turnaround", "avg_waiting",
               "cpu_utilization", "miss_ratio", "total_value", "response_samples", "reduction")


def format_comparison_csv(table: ComparisonTable) -> str:
    buf = io.StringIO()
    buf.write(",".join(ROW_COLUMNS) + "\n")
    for r in table.rows + table.aggregate:
        buf.write(",".join(fmt(getattr(r, c)) for c in ROW_COLUMNS) + "\n")
    return buf.getvalue()


def format_comparison_text(table: ComparisonTable) -> str:
    header = ("case", "policy", "avg_resp", "avg_turn", "avg_wait", "util", "miss", "value",
              f"red_vs_{table.reference}")
    body = []
    for r in table.rows + table.aggregate:
        body.append((r.workload, r.policy, fmt(r.avg_response, 1), fmt(r.avg_turnaround, 1),
                     fmt(r.avg_waiting, 1), fmt(r.cpu_utilization, 3), fmt(r.miss_ratio, 3),
                     fmt(r.total_value, 2),
                     "" if r.reduction is None else f"{float(r.reduction) * 100:.1f}%"))
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) if i > 1 else c.ljust(w) for i, (c, w) in enumerate(zip(row, widths)))
             for row in [header, *body]]
    return "\n".join(line.rstrip() for line in lines) + "\n"


def plot_response(table: ComparisonTable, path) -> None:
    """Bar chart of aggregate average response time per policy, as SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "schedsim"
    fig, ax = plt.subplots(figsize=(6, 3.5))
    names = [r.policy for r in table.aggregate]
    values = [float(r.avg_response or 0) for r in table.aggregate]
    ax.bar(names, values, color="0.55")
    ax.set_ylabel("average response (ticks)")
    ax.set_title(f"average response over {len(table.workloads)} cases")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
