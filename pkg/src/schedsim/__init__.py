"""Deterministic uniprocessor scheduling simulator.

Policies: FCFS, round-robin, EDF, DASA, LBESA and a multi-level feedback
queue with dynamic levels, deadline urgency and admission control (NMLFQ).
"""

from .engine import (HorizonExceeded, InvalidWorkload, PolicyContractViolation, Segment,
                     Simulator, Trace, TraceRecord, format_trace, read_trace, run,
                     scheduling_points, verify_trace, write_trace)
from .metrics import MetricsReport, compare, compute
from .model import (MS, JobState, JobStatus, NmlfqConfig, SimConfig, TaskSpec, Violation,
                    Workload, slack, validate_workload)
from .nmlfq import NMLFQ, ReadyTable
from .policies import POLICY_NAMES, make_policy
from .workload import GenSpec, generate, load_suite, parse, serialize

__version__ = "0.1.0"

__all__ = [
    "GenSpec", "HorizonExceeded", "InvalidWorkload", "JobState", "JobStatus", "MS",
    "MetricsReport", "NMLFQ", "NmlfqConfig", "POLICY_NAMES", "PolicyContractViolation",
    "ReadyTable", "Segment", "SimConfig", "Simulator", "TaskSpec", "Trace", "TraceRecord",
    "Violation", "Workload", "compare", "compute", "format_trace", "generate", "load_suite",
    "make_policy", "parse", "read_trace", "run", "scheduling_points", "serialize", "slack",
    "validate_workload", "verify_trace", "write_trace",
]
