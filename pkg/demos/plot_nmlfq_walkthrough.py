"""
NMLFQ step by step
==================

Three jobs: a long one with a loose deadline and two short urgent arrivals.
The level column in the trace shows where each job sits after every event;
the urgent arrivals enter level 0 and preempt the long job.
"""

from schedsim import MS, NmlfqConfig, SimConfig, TaskSpec, Workload, run

w = Workload((
    TaskSpec(0, 0, 8 * MS, 40 * MS),
    TaskSpec(1, 2 * MS, 1 * MS, 4 * MS),
    TaskSpec(2, 3 * MS, 2 * MS, 7 * MS),
), name="walkthrough")

trace, states = run(w, "nmlfq", SimConfig(nmlfq=NmlfqConfig(base_quantum=1 * MS)))

for rec in trace.events:
    print(f"{rec.time:>6}  {rec.kind:<15} job={rec.job_id!s:<4} level={rec.level}")
print()
for seg in trace.segments:
    print(f"job {seg.job_id} ran [{seg.start}, {seg.end})")
