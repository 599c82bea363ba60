"""Independent reference implementations the tests check the package against.

Nothing here imports the simulator's scheduling code: the tick simulator
advances one tick at a time and the feasibility oracles enumerate.
"""

from itertools import combinations, permutations


def tick_sim(tasks, policy, quantum=None):
    """Tick-by-tick uniprocessor run with zero dispatch latency.

    ``tasks`` is a list of ``(id, arrival, burst, deadline)``.  Returns
    ``(segments, first_start, completion)`` with segments merged per
    contiguous run of one job.
    """
    remaining = {t[0]: t[2] for t in tasks}
    arrival = {t[0]: t[1] for t in tasks}
    deadline = {t[0]: t[3] for t in tasks}
    first, done = {}, {}
    timeline = []
    fifo = []
    current, used = None, 0
    t = 0
    while len(done) < len(tasks):
        if policy == "rr":
            if current is not None and used == quantum:
                fifo.append(current)
                current, used = None, 0
            fifo.extend(i for i in sorted(arrival, key=lambda i: (arrival[i], i)) if arrival[i] == t)
        ready = [i for i in remaining if arrival[i] <= t and i not in done]
        pick = None
        if policy == "edf":
            if ready:
                pick = min(ready, key=lambda i: (deadline[i], arrival[i], i))
        elif policy == "fcfs":
            if current is not None:
                pick = current
            elif ready:
                pick = min(ready, key=lambda i: (arrival[i], i))
        elif policy == "rr":
            if current is None and fifo:
                current, used = fifo.pop(0), 0
            pick = current
        else:
            raise ValueError(policy)
        timeline.append(pick)
        if pick is not None:
            first.setdefault(pick, t)
            remaining[pick] -= 1
            if policy in ("fcfs", "rr"):
                current = pick
                used += 1
            if remaining[pick] == 0:
                done[pick] = t + 1
                if policy in ("fcfs", "rr"):
                    current, used = None, 0
        t += 1
    segments = []
    for x, job in enumerate(timeline):
        if job is None:
            continue
        if segments and segments[-1][0] == job and segments[-1][2] == x:
            segments[-1] = (job, segments[-1][1], x + 1)
        else:
            segments.append((job, x, x + 1))
    return segments, first, done


def demand_ok(tasks):
    """Processor-demand criterion by brute force over every pair of event points."""
    points = sorted({t[1] for t in tasks} | {t[3] for t in tasks})
    for t1, t2 in combinations(points, 2):
        demand = sum(t[2] for t in tasks if t[1] >= t1 and t[3] <= t2)
        if demand > t2 - t1:
            return False
    return True


def order_exists(jobs, now):
    """Some sequential order of ``(remaining, deadline)`` jobs meets every deadline."""
    for perm in permutations(jobs):
        clock = now
        for rem, dl in perm:
            clock += rem
            if clock > dl:
                break
        else:
            return True
    return not jobs


def best_keep_set(jobs, now):
    """Maximum-value feasible subset of ``{name: (remaining, deadline, value)}``."""
    best, best_value = frozenset(), 0
    names = sorted(jobs)
    for r in range(len(names) + 1):
        for subset in combinations(names, r):
            if order_exists([jobs[n][:2] for n in subset], now):
                value = sum(jobs[n][2] for n in subset)
                if value > best_value:
                    best, best_value = frozenset(subset), value
    return best, best_value
