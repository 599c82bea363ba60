"""Seeded workload generation and the workload CSV format.

File format: UTF-8 CSV with header ``id,arrival,burst,deadline,value``; time
columns are integer ticks, ``value`` is a decimal and may be omitted (it then
defaults to 1).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .model import TaskSpec, Workload, validate_workload

COLUMNS = ("id", "arrival", "burst", "deadline", "value")
LOAD_TOLERANCE = Fraction(2, 100)


class InfeasibleSpec(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ValidationError(ValueError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__("; ".join(f"task {v.task_id}: {v.rule}" for v in violations))


@dataclass(frozen=True)
class GenSpec:
    """Recipe for a synthetic workload.

    ``target_load`` is total burst over ``span``; above 1 the workload is
    overloaded.  Deadlines are ``arrival + ceil(burst * factor)`` with the
    factor drawn from ``deadline_tightness``.  ``value_mode`` is ``"unit"`` or
    ``("uniform", lo, hi)``.
    """

    n_tasks: int = 20
    target_load: float = 0.8
    span: int = 100_000
    burst_range: tuple = (500, 10_000)
    deadline_tightness: tuple = (1.5, 4.0)
    value_mode: object = "unit"
    seed: int = 0
    name: Optional[str] = None

    def __post_init__(self):
        if self.n_tasks < 1:
            raise InfeasibleSpec("n_tasks must be >= 1")
        if self.span < 1:
            raise InfeasibleSpec("span must be >= 1")
        lo, hi = self.burst_range
        if not 1 <= lo <= hi:
            raise InfeasibleSpec(f"bad burst_range {self.burst_range}")
        flo, fhi = self.deadline_tightness
        if not 1 <= flo <= fhi:
            raise InfeasibleSpec(f"bad deadline_tightness {self.deadline_tightness}")
        if self.target_load <= 0:
            raise InfeasibleSpec("target_load must be > 0")
        if self.value_mode != "unit":
            kind, vlo, vhi = self.value_mode
            if kind != "uniform" or not 0 <= vlo <= vhi:
                raise InfeasibleSpec(f"bad value_mode {self.value_mode}")


def _fit_total(raw: np.ndarray, total: int, lo: int, hi: int) -> list:
    """Integer bursts in [lo, hi] proportional to ``raw`` and summing to ``total``."""
    n = len(raw)
    fixed = {}
    # water-fill: scale the free bursts, pin the ones that leave the range
    while True:
        free = [i for i in range(n) if i not in fixed]
        if not free:
            break
        budget = total - sum(fixed.values())
        scale = budget / float(sum(raw[i] for i in free))
        over = [i for i in free if raw[i] * scale > hi]
        under = [i for i in free if raw[i] * scale < lo]
        if not over and not under:
            break
        for i in over:
            fixed[i] = hi
        if not over:
            for i in under:
                fixed[i] = lo
    bursts = [fixed.get(i, lo) for i in range(n)]
    for i in free:
        bursts[i] = min(hi, max(lo, int(round(raw[i] * scale))))
    # settle rounding drift one tick at a time, cycling deterministically
    diff = total - sum(bursts)
    i = 0
    while diff:
        step = 1 if diff > 0 else -1
        j = i % n
        if lo <= bursts[j] + step <= hi:
            bursts[j] += step
            diff -= step
        i += 1
    return bursts


def generate(g: GenSpec) -> Workload:
    """Deterministic workload for ``g``; same seed, same tasks on every host."""
    lo, hi = g.burst_range
    total = round(g.target_load * g.span)
    if not g.n_tasks * lo <= total <= g.n_tasks * hi:
        raise InfeasibleSpec(
            f"{g.n_tasks} bursts in [{lo}, {hi}] cannot sum to {total} (load {g.target_load})")
    if abs(Fraction(total, g.span) - Fraction(g.target_load)) > LOAD_TOLERANCE * Fraction(g.target_load):
        raise InfeasibleSpec(f"span {g.span} too short to express load {g.target_load}")
    rng = np.random.default_rng(g.seed)
    arrivals = np.sort(rng.integers(0, g.span, size=g.n_tasks))
    raw = rng.integers(lo, hi + 1, size=g.n_tasks).astype(float)
    bursts = _fit_total(raw, total, lo, hi)
    factors = rng.uniform(g.deadline_tightness[0], g.deadline_tightness[1], size=g.n_tasks)
    if g.value_mode == "unit":
        values = [Fraction(1)] * g.n_tasks
    else:
        _, vlo, vhi = g.value_mode
        milli = rng.integers(round(vlo * 1000), round(vhi * 1000) + 1, size=g.n_tasks)
        values = [Fraction(int(m), 1000) for m in milli]
    tasks = []
    for i in range(g.n_tasks):
        arrival = int(arrivals[i])
        burst = int(bursts[i])
        deadline = arrival + max(burst, math.ceil(burst * float(factors[i])))
        tasks.append(TaskSpec(i, arrival, burst, deadline, values[i]))
    name = g.name or f"gen-n{g.n_tasks}-load{g.target_load:g}-seed{g.seed}"
    w = Workload(tuple(tasks), name=name, seed=g.seed)
    assert not validate_workload(w)
    return w


def realized_load(w: Workload, span: int) -> Fraction:
    return Fraction(w.total_burst(), span)


# -- CSV --------------------------------------------------------------------

def format_value(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    d = v.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return f"{v.numerator}/{v.denominator}"
    text = format(Decimal(v.numerator) / Decimal(v.denominator), "f")
    return text.rstrip("0").rstrip(".") if "." in text else text


def format_workload(w: Workload) -> str:
    buf = io.StringIO()
    buf.write(",".join(COLUMNS) + "\n")
    for t in w.tasks:
        buf.write(f"{t.id},{t.arrival},{t.burst},{t.deadline},{format_value(t.value)}\n")
    return buf.getvalue()


def serialize(w: Workload, path) -> None:
    Path(path).write_text(format_workload(w), encoding="utf-8", newline="\n")


def parse_text(text: str, name: str = "workload") -> Workload:
    rows = csv.reader(io.StringIO(text))
    try:
        header = next(rows)
    except StopIteration:
        raise ParseError("empty file", 1) from None
    header = [h.strip() for h in header]
    unknown = [h for h in header if h not in COLUMNS]
    if unknown:
        raise ParseError(f"unknown columns {unknown}", 1)
    missing = [c for c in COLUMNS[:4] if c not in header]
    if missing:
        raise ParseError(f"missing columns {missing}", 1)
    if len(set(header)) != len(header):
        raise ParseError("duplicate columns", 1)
    tasks = []
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
        rec = dict(zip(header, (c.strip() for c in row)))
        try:
            value = Fraction(rec["value"]) if rec.get("value") else Fraction(1)
            tasks.append(TaskSpec(int(rec["id"]), int(rec["arrival"]), int(rec["burst"]),
                                  int(rec["deadline"]), value))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    w = Workload(tuple(tasks), name=name)
    violations = validate_workload(w)
    if violations:
        raise ValidationError(violations)
    return w


def parse(path) -> Workload:
    path = Path(path)
    return parse_text(path.read_text(encoding="utf-8"), name=path.stem)


# -- bundled twenty-case suite ---------------------------------------------

SUITE_SIZE = 20


def suite_specs() -> list:
    """The frozen twenty-case suite: ten underloaded cases then ten overloaded ones."""
    specs = []
    for k in range(SUITE_SIZE):
        step = k if k < 10 else k + 1  # skip load 1.00, the boundary
        load = round(0.6 + 0.04 * step, 2)
        specs.append(GenSpec(
            n_tasks=15 + (25 * k) // (SUITE_SIZE - 1),
            target_load=load,
            span=100_000,
            burst_range=(200, 20_000),
            deadline_tightness=(1.5, 4.0),
            value_mode="unit",
            seed=k + 1,
            name=f"case{k + 1:02d}_load{load:.2f}",
        ))
    return specs


def format_manifest(specs) -> str:
    return "".join(f"{g.name} {g.seed}\n" for g in specs)


def parse_manifest(text: str) -> list:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            name, seed = line.split()
            out.append((name, int(seed)))
    return out


def write_suite(directory) -> list:
    """Materialize the bundled suite as CSV files plus ``manifest.txt``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    specs = suite_specs()
    paths = []
    for g in specs:
        path = directory / f"{g.name}.csv"
        serialize(generate(g), path)
        paths.append(path)
    (directory / "manifest.txt").write_text(format_manifest(specs), encoding="utf-8", newline="\n")
    return paths


def load_suite(directory=None) -> list:
    """Workloads listed in a suite directory's manifest, in manifest order.

    Without a directory, the copy shipped inside the package is used.
    """
    if directory is None:
        base = resources.files("schedsim") / "data" / "suite"
        manifest = parse_manifest(base.joinpath("manifest.txt").read_text(encoding="utf-8"))
        return [parse_text(base.joinpath(f"{name}.csv").read_text(encoding="utf-8"), name=name)
                for name, _ in manifest]
    directory = Path(directory)
    manifest = parse_manifest((directory / "manifest.txt").read_text(encoding="utf-8"))
    return [parse(directory / f"{name}.csv") for name, _ in manifest]
