"""
The twenty-case comparison
==========================

Run NMLFQ, DASA and LBESA over the bundled suite (loads 0.60 to 1.40) and
plot average response time per case.  Needs matplotlib for the figure.
"""

from schedsim import compute, load_suite, run
from schedsim.metrics import compare, format_comparison_text

reports = [compute(*run(w, p)) for w in load_suite() for p in ("nmlfq", "dasa", "lbesa")]
table = compare(reports)
print(format_comparison_text(table))
for other in ("dasa", "lbesa"):
    print(f"response-time reduction vs {other}: {float(table.reduction(other)):.1%}")

# the suite spans both regimes; cases above load 1.00 are overloaded
for regime, over in (("underload", False), ("overload", True)):
    sub = compare([r for r in reports if (float(r.workload.rsplit("load", 1)[1]) > 1) == over])
    print(regime, "  ".join(f"vs {p} {float(sub.reduction(p)):.1%}" for p in ("dasa", "lbesa")))

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    cases = table.workloads
    for policy in table.policies:
        by_case = {r.workload: r.avg_response for r in table.rows if r.policy == policy}
        ys = [float(by_case[c] or 0) for c in cases]
        plt.plot(range(1, len(cases) + 1), ys, marker="o", label=policy)
    plt.xlabel("case (increasing load)")
    plt.ylabel("average response time (ticks)")
    plt.legend()
    plt.savefig("suite_response.png")
