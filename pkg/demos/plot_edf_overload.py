"""
EDF under underload and overload
================================

EDF meets every deadline whenever the processor-demand test passes.  Past
that point it can fail badly: one late job drags later ones with it.
"""

from schedsim import GenSpec, compute, generate, run
from schedsim.feasibility import workload_demand_feasible

for load in (0.7, 0.9, 1.1, 1.4):
    w = generate(GenSpec(n_tasks=15, target_load=load, span=50_000, seed=3))
    report = compute(*run(w, "edf"))
    print(f"load {load:.1f}  demand-feasible={workload_demand_feasible(w.tasks)!s:5}  "
          f"misses {report.misses:>2}/{report.n_jobs}")
