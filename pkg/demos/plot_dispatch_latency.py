"""
Dispatch latency turns a feasible job into a late one
=====================================================

A single job arrives at 0 with a 3 ms burst and a 3 ms deadline.  With no
dispatch latency it finishes exactly on time; a 1 ms latency pushes the
first dispatch to 1 ms and completion to 4 ms.
"""

from schedsim import MS, SimConfig, TaskSpec, Workload, format_trace, run

w = Workload((TaskSpec(0, 0, 3 * MS, 3 * MS),), name="single")

for latency in (0, 1 * MS):
    trace, states = run(w, "edf", SimConfig(dispatch_latency=latency))
    job = states[0]
    print(f"latency {latency:>5}: first dispatch {job.first_dispatch}, "
          f"completion {job.completion}, late={job.completion > job.spec.deadline}")

# the trace shows the LatencyElapsed record ahead of the segment
print(format_trace(trace))
