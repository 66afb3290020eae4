"""Algorithms for one-station networks.

A one-station network has ``n`` lines, each with one arrival and one
departure joined by a wait activity. Energy arcs pair departures with
arrivals. With the waits contracted, a perfect matching of energy arcs is a
permutation ``phi`` of the lines (departure of ``k`` feeds the arrival of
``phi[k]``) and its components are the cycles of ``phi``.

Lines are addressed by index ``0..n-1`` in the order of their ids.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .core import (
    Activity,
    ActivityKind,
    Component,
    Event,
    EventKind,
    Instance,
    Solution,
    build_cycle_timetable,
    cycle_stats,
    decompose,
    distance_to_multiple,
    evaluate,
)
from .matching import max_weight_matching as _assignment
from .solver import Objective, SolveRequest, Status, solve_exact

ALL = "all"
STATION = "S"


def line_id(k: int) -> str:
    return f"L{k + 1:02d}"


def arr_id(k: int) -> str:
    return f"{line_id(k)}.arr"


def dep_id(k: int) -> str:
    return f"{line_id(k)}.dep"


def wait_id(k: int) -> str:
    return f"wait.{line_id(k)}"


def energy_id(dep_line: int, arr_line: int) -> str:
    return f"energy.{line_id(dep_line)}.{line_id(arr_line)}"


def transfer_id(from_line: int, to_line: int) -> str:
    return f"trans.{line_id(from_line)}.{line_id(to_line)}"


@dataclass(frozen=True)
class OneStationSpec:
    """Parameters of a one-station network.

    ``transfer_arcs`` holds ``(from_line, to_line, lower, weight)`` tuples
    (arrival of ``from_line`` to departure of ``to_line``); ``energy_arcs`` is
    ``"all"`` or a sequence of ``(dep_line, arr_line)`` pairs.
    """

    n: int
    accel_times: tuple[int, ...]
    brake_times: tuple[int, ...]
    wait_bounds: tuple[tuple[int, int], ...]
    wait_weights: tuple = ()
    transfer_arcs: tuple = ()
    energy_arcs: Union[str, tuple] = ALL

    def __post_init__(self):
        for name in ("accel_times", "brake_times", "wait_bounds", "wait_weights", "transfer_arcs"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.energy_arcs != ALL:
            object.__setattr__(self, "energy_arcs", tuple(tuple(p) for p in self.energy_arcs))
        if self.n < 1:
            raise ValueError("need at least one line")
        if not len(self.accel_times) == len(self.brake_times) == len(self.wait_bounds) == self.n:
            raise ValueError("per-line vectors must have length n")
        if self.wait_weights and len(self.wait_weights) != self.n:
            raise ValueError("wait_weights must be empty or have length n")
        if min(self.accel_times) <= 0 or min(self.brake_times) <= 0:
            raise ValueError("acceleration and braking times must be positive")

    @property
    def all_arcs(self) -> bool:
        return self.energy_arcs == ALL

    def pairs(self) -> list[tuple[int, int]]:
        if self.all_arcs:
            return [(k, m) for k in range(self.n) for m in range(self.n)]
        return sorted(set(self.energy_arcs))


@dataclass(frozen=True)
class WeightedMatchingReport:
    matching: frozenset[str]
    weight: int


@dataclass(frozen=True)
class DispatchResult:
    """A solution and how it was obtained.

    ``lower`` and ``upper`` bracket the optimum; they coincide when
    ``optimal`` is set.
    """

    solution: Solution
    method: str
    lower: int
    upper: int
    optimal: bool


class PreconditionError(ValueError):
    """The instance does not belong to the special case a solver handles."""


def build_one_station(spec: OneStationSpec, period: int) -> Instance:
    """Event-activity network of a single station with ``2n`` events."""
    events = []
    for k in range(spec.n):
        events.append(Event(arr_id(k), EventKind.ARRIVAL, line_id(k), STATION, brake_time=spec.brake_times[k]))
        events.append(Event(dep_id(k), EventKind.DEPARTURE, line_id(k), STATION, accel_time=spec.accel_times[k]))
    acts = []
    for k, (lo, hi) in enumerate(spec.wait_bounds):
        w = Fraction(spec.wait_weights[k]) if spec.wait_weights else Fraction(0)
        acts.append(Activity(wait_id(k), ActivityKind.WAIT, arr_id(k), dep_id(k), lo, hi, w))
    for frm, to, lo, w in spec.transfer_arcs:
        acts.append(
            Activity(transfer_id(frm, to), ActivityKind.TRANSFER, arr_id(frm), dep_id(to), lo, lo + period - 1, Fraction(w))
        )
    for k, m in spec.pairs():
        acts.append(Activity(energy_id(k, m), ActivityKind.ENERGY, dep_id(k), arr_id(m), 0, period - 1))
    return Instance(period, tuple(events), tuple(acts))


# ---------------------------------------------------------------------------
# reading a one-station instance back


@dataclass
class _Station:
    lines: list[str]
    ac: list[int]
    br: list[int]
    lo: list[int]
    hi: list[int]
    arc: dict  # (dep line, arr line) -> activity id
    period: int | None
    arr: list[str] = field(default_factory=list)
    dep: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.lines)

    @property
    def all_arcs(self) -> bool:
        return len(self.arc) == self.n * self.n

    def w(self, k: int, m: int) -> int:
        return min(self.ac[k], self.br[m])

    def ids(self, pairs) -> frozenset[str]:
        return frozenset(self.arc[p] for p in pairs)


def _view(source) -> _Station:
    if isinstance(source, OneStationSpec):
        return _Station(
            lines=[line_id(k) for k in range(source.n)],
            ac=list(source.accel_times),
            br=list(source.brake_times),
            lo=[b[0] for b in source.wait_bounds],
            hi=[b[1] for b in source.wait_bounds],
            arc={p: energy_id(*p) for p in source.pairs()},
            period=None,
            arr=[arr_id(k) for k in range(source.n)],
            dep=[dep_id(k) for k in range(source.n)],
        )
    inst: Instance = source
    if len({e.station for e in inst.events}) > 1:
        raise PreconditionError("not a one-station network")
    by_line: dict[str, dict[str, Event]] = {}
    for e in inst.events:
        slot = by_line.setdefault(e.line, {})
        if e.kind.value in slot:
            raise PreconditionError(f"line {e.line!r} has more than one {e.kind.value} event")
        slot[e.kind.value] = e
    lines = sorted(by_line)
    for ln in lines:
        if set(by_line[ln]) != {"arr", "dep"}:
            raise PreconditionError(f"line {ln!r} needs one arrival and one departure")
    index = {ln: k for k, ln in enumerate(lines)}
    wait = {}
    for a in inst.activities:
        if a.kind is ActivityKind.WAIT:
            wait[inst.event[a.tail].line] = a
        elif a.kind is not ActivityKind.ENERGY and not a.is_free(inst.period):
            raise PreconditionError(f"activity {a.id!r} is neither a wait nor free")
    if set(wait) != set(lines):
        raise PreconditionError("every line needs exactly one wait activity")
    arc = {}
    for a in sorted(inst.energy_arcs, key=lambda a: a.id):
        p = (index[inst.event[a.tail].line], index[inst.event[a.head].line])
        arc.setdefault(p, a.id)
    return _Station(
        lines=lines,
        ac=[by_line[ln]["dep"].accel_time for ln in lines],
        br=[by_line[ln]["arr"].brake_time for ln in lines],
        lo=[wait[ln].lower for ln in lines],
        hi=[wait[ln].upper for ln in lines],
        arc=arc,
        period=inst.period,
        arr=[by_line[ln]["arr"].id for ln in lines],
        dep=[by_line[ln]["dep"].id for ln in lines],
    )


def _perm_pairs(phi: Sequence[int]) -> list[tuple[int, int]]:
    return [(k, phi[k]) for k in range(len(phi))]


def _cycles(phi: Sequence[int]) -> list[list[int]]:
    seen, out = set(), []
    for s in range(len(phi)):
        if s in seen:
            continue
        cyc, k = [], s
        while k not in seen:
            seen.add(k)
            cyc.append(k)
            k = phi[k]
        out.append(cyc)
    return out


# ---------------------------------------------------------------------------
# matchings


def _greedy_perm(st: _Station) -> list[int]:
    by_ac = sorted(range(st.n), key=lambda k: (st.ac[k], k))
    by_br = sorted(range(st.n), key=lambda k: (st.br[k], k))
    phi = [0] * st.n
    for k, m in zip(by_ac, by_br):
        phi[k] = m
    return phi


def greedy_matching(spec) -> WeightedMatchingReport:
    """Pair the r-th smallest acceleration time with the r-th smallest braking time.

    This is a maximum-weight perfect matching for weights
    ``min(t_ac, t_br)``. Needs every departure/arrival pair to be admissible.
    """
    st = _view(spec)
    if not st.all_arcs:
        raise PreconditionError("greedy matching needs all energy arcs; use max_weight_matching")
    phi = _greedy_perm(st)
    return WeightedMatchingReport(st.ids(_perm_pairs(phi)), sum(st.w(k, phi[k]) for k in range(st.n)))


def max_weight_matching(source) -> WeightedMatchingReport:
    """Maximum-weight matching on the energy arcs with weights ``t_min``.

    Its weight bounds the total overlap of every solution from above.
    """
    st = _view(source)
    edges = [(aid, st.dep[k], st.arr[m], st.w(k, m)) for (k, m), aid in st.arc.items()]
    chosen, total = _assignment(edges)
    return WeightedMatchingReport(frozenset(chosen), total)


def _pairs_of(st: _Station, matching) -> list[tuple[int, int]]:
    inv = {aid: p for p, aid in st.arc.items()}
    return [inv[aid] for aid in sorted(matching)]


def extend_to_perfect(matching, spec) -> frozenset[str]:
    """Complete a matching by pairing free departures with free arrivals in index order."""
    st = _view(spec)
    if not st.all_arcs:
        raise PreconditionError("extension needs all energy arcs")
    pairs = _pairs_of(st, matching)
    used_d = {k for k, _ in pairs}
    used_a = {m for _, m in pairs}
    free_d = [k for k in range(st.n) if k not in used_d]
    free_a = [m for m in range(st.n) if m not in used_a]
    return frozenset(matching) | st.ids(zip(free_d, free_a))


# ---------------------------------------------------------------------------
# Hamiltonian cycles on the contracted line graph


def _held_karp(W: np.ndarray) -> list[int]:
    """Maximum-weight Hamiltonian cycle of a complete digraph as a successor list."""
    n = len(W)
    if n == 1:
        return [0]
    NEG = np.iinfo(np.int64).min // 4
    full = 1 << n
    dp = np.full((full, n), NEG, dtype=np.int64)
    dp[1, 0] = 0
    for mask in range(1, full, 2):  # node 0 is always in the set
        row = dp[mask]
        if row.max() == NEG:
            continue
        outside = [j for j in range(1, n) if not mask >> j & 1]
        if not outside:
            continue
        gains = row[:, None] + W[:, outside]  # [last, next]
        best = gains.max(axis=0)
        for t, j in enumerate(outside):
            nm = mask | (1 << j)
            if best[t] > dp[nm, j]:
                dp[nm, j] = best[t]
    last = full - 1
    totals = dp[last] + W[:, 0]
    totals[0] = NEG
    end = int(np.argmax(totals))
    # walk back, preferring the smallest predecessor on ties
    order = [end]
    mask, j = last, end
    while mask != 1:
        prev_mask = mask ^ (1 << j)
        cand = dp[prev_mask] + W[:, j]
        i = int(np.argmax(np.where(np.arange(n) == j, NEG, cand)))
        order.append(i)
        mask, j = prev_mask, i
    order.reverse()  # starts at 0
    succ = [0] * n
    for a, b in zip(order, order[1:] + order[:1]):
        succ[a] = b
    return succ


def _cycle_weight(st: _Station, phi) -> int:
    return sum(st.w(k, phi[k]) for k in range(st.n))


def _min_arc(st: _Station, phi) -> int:
    """Line whose outgoing arc has the smallest weight (ties by index)."""
    return min(range(st.n), key=lambda k: (st.w(k, phi[k]), k))


def max_weight_hamiltonian_cycle(spec, limit: int = 20) -> WeightedMatchingReport:
    """Exact maximum-weight Hamiltonian cycle by dynamic programming over subsets.

    Dropping the lightest arc of the returned cycle gives a maximum-weight
    Hamiltonian path (see :func:`hamiltonian_path_weight`).
    """
    st = _view(spec)
    if not st.all_arcs:
        raise PreconditionError("Hamiltonian machinery needs all energy arcs")
    if st.n > limit:
        raise PreconditionError(f"exact Hamiltonian cycle limited to {limit} lines")
    W = np.array([[st.w(k, m) for m in range(st.n)] for k in range(st.n)], dtype=np.int64)
    phi = _held_karp(W)
    return WeightedMatchingReport(st.ids(_perm_pairs(phi)), _cycle_weight(st, phi))


def hamiltonian_path_weight(spec, matching) -> int:
    """Weight of a Hamiltonian-cycle matching after removing its lightest arc."""
    st = _view(spec)
    pairs = _pairs_of(st, matching)
    if len(pairs) != st.n:
        raise ValueError("expected a perfect matching")
    return sum(st.w(k, m) for k, m in pairs) - min(st.w(k, m) for k, m in pairs)


def merge_steps(spec) -> list[list[int]]:
    """Successive permutations produced by the merge heuristic, greedy first."""
    st = _view(spec)
    if not st.all_arcs:
        raise PreconditionError("merge heuristic needs all energy arcs")
    rank = sorted(range(st.n), key=lambda k: (st.ac[k], k))  # rank -> line
    phi = _greedy_perm(st)
    steps = [list(phi)]
    while True:
        cyc = set(next(c for c in _cycles(phi) if rank[0] in c))
        if len(cyc) == st.n:
            return steps
        i = next(i for i in range(st.n - 1) if rank[i] in cyc and rank[i + 1] not in cyc)
        a, b = rank[i], rank[i + 1]
        phi[a], phi[b] = phi[b], phi[a]
        steps.append(list(phi))


def merge_heuristic(spec) -> WeightedMatchingReport:
    """Turn the greedy matching into one Hamiltonian cycle by adjacent swaps.

    Lines are ranked by acceleration time. While the cycle through the
    lowest-ranked line misses some line, take the smallest rank ``i`` inside
    that cycle whose successor rank ``i + 1`` is outside it and exchange the
    arrival partners of the two. Each exchange merges two cycles and loses at
    most the overlap of the two acceleration-time intervals, which keeps the
    resulting Hamiltonian path within ``min(max t_ac, max t_br)`` of the
    greedy weight.
    """
    st = _view(spec)
    phi = merge_steps(spec)[-1]
    return WeightedMatchingReport(st.ids(_perm_pairs(phi)), _cycle_weight(st, phi))


# ---------------------------------------------------------------------------
# solutions from matchings


def _timetable_for(instance: Instance, matching, components: list[Component] | None = None) -> dict[str, int]:
    tt: dict[str, int] = {}
    for comp in components or decompose(instance, matching):
        tt.update(build_cycle_timetable(instance, matching, comp))
    return tt


def solve_with_matching(instance: Instance, matching) -> Solution:
    """Best timetable for a fixed matching, component by component."""
    matching = frozenset(matching)
    return evaluate(instance, matching, _timetable_for(instance, matching))


def _require_energy_view(instance: Instance) -> _Station:
    if not isinstance(instance, Instance):
        raise TypeError("expected an Instance")
    return _view(instance)


def solve_free_waiting(instance: Instance) -> Solution:
    """Optimal overlap when every wait activity is free.

    Takes a maximum-weight matching and, on every cycle, pushes the periodic
    correction into a free wait so all matched arcs reach full overlap.
    """
    st = _require_energy_view(instance)
    T = instance.period
    if any(h - l < T - 1 for l, h in zip(st.lo, st.hi)):
        raise PreconditionError("some wait activity is not free")
    matching = max_weight_matching(instance).matching
    tt: dict[str, int] = {}
    for comp in decompose(instance, matching):
        x = {}
        for aid in comp.arcs:
            a = instance.activity[aid]
            x[aid] = instance.t_min(a) if a.kind is ActivityKind.ENERGY else a.lower
        if comp.is_cycle:
            first_wait = next(aid for aid in comp.arcs if instance.activity[aid].kind is ActivityKind.WAIT)
            x[first_wait] += -sum(x.values()) % T
        tt.update(_place(instance, comp, x))
    return evaluate(instance, matching, tt)


def _place(instance: Instance, comp: Component, x: dict[str, int]) -> dict[str, int]:
    T = instance.period
    rel = {comp.events[0]: 0}
    for aid in comp.arcs:
        a = instance.activity[aid]
        if a.head not in rel:
            rel[a.head] = rel[a.tail] + x[aid]
    base = rel[min(comp.events)]
    return {e: (t - base) % T for e, t in rel.items()}


def _require_all(st: _Station):
    if not st.all_arcs:
        raise PreconditionError("this solver needs all energy arcs")


def solve_single_cycle_variant(instance: Instance) -> Solution:
    """Best solution whose matching closes all lines into a single cycle."""
    st = _require_energy_view(instance)
    _require_all(st)
    return solve_with_matching(instance, max_weight_hamiltonian_cycle(instance).matching)


def large_period_threshold(instance: Instance) -> int:
    """Smallest period for which the large-period solver applies."""
    st = _require_energy_view(instance)
    u_max = max(st.hi) + max(instance.t_min(a) + instance.t_max(a) for a in instance.energy_arcs)
    return st.n * u_max


def solve_large_period(instance: Instance) -> Solution:
    """Optimal overlap for huge periods via a maximum-weight Hamiltonian path.

    When ``T >= n * u_max`` no cycle can realize full overlap on its
    lightest arc, so cutting the best Hamiltonian cycle into a path loses
    nothing.
    """
    st = _require_energy_view(instance)
    _require_all(st)
    if instance.period < large_period_threshold(instance):
        raise PreconditionError("period too small for the large-period case")
    cyc = max_weight_hamiltonian_cycle(instance)
    pairs = _pairs_of(st, cyc.matching)
    drop = min(pairs, key=lambda p: (st.w(*p), p[0]))
    matching = st.ids(p for p in pairs if p != drop)
    return solve_with_matching(instance, matching)


def solve_uniform_times(instance: Instance) -> Solution:
    """Optimal overlap when all acceleration or all braking times agree.

    Any single cycle through all lines is optimal; lines are chained in
    index order.
    """
    st = _require_energy_view(instance)
    _require_all(st)
    if len(set(st.ac)) > 1 and len(set(st.br)) > 1:
        raise PreconditionError("neither acceleration nor braking times are uniform")
    phi = [(k + 1) % st.n for k in range(st.n)]
    return solve_with_matching(instance, st.ids(_perm_pairs(phi)))


# ---------------------------------------------------------------------------
# equal acceleration and braking times


def _block_bounds(t, lo, hi, s, l):
    """Full-overlap interval of the cycle over sorted trains ``s..l``."""
    L = t[s] + sum(t[s:l]) + sum(lo[s : l + 1])
    U = sum(hi[s : l + 1]) + sum(t[s + 1 : l + 1]) + t[l]
    return L, U


def contiguous_cycle_overlap(s: int, l: int, sorted_times: Sequence[int], wait_bounds, period: int) -> int:
    """Maximum overlap of the cycle through sorted trains ``s..l`` (inclusive).

    Departure ``i`` feeds arrival ``i - 1`` inside the block and departure
    ``s`` closes the cycle at arrival ``l``.
    """
    t = list(sorted_times)
    if any(a > b for a, b in zip(t, t[1:])):
        raise ValueError("trains must be sorted by time")
    if not 0 <= s <= l < len(t):
        raise ValueError("need 0 <= s <= l < n")
    lo = [b[0] for b in wait_bounds]
    hi = [b[1] for b in wait_bounds]
    L, U = _block_bounds(t, lo, hi, s, l)
    return sum(t[s:l]) + max(t[s] - distance_to_multiple(L, U, period), 0)


def equal_times_blocks(t: Sequence[int], lo, hi, period: int) -> tuple[int, list[tuple[int, int]]]:
    """Optimal partition of sorted trains into contiguous cycles.

    Runs in O(n^2), keeping for each block start the running full-overlap
    interval and time sum. Returns the optimum and the blocks ``(s, l)``.
    """
    n = len(t)
    opt = [0] * (n + 1)
    choice = [0] * (n + 1)
    L, U, S = [0] * n, [0] * n, [0] * n  # per block start j, for the block j..i
    for i in range(n):
        for j in range(i):
            # extending j..i-1 to j..i
            L[j] += t[i - 1] + lo[i]
            U[j] += 2 * t[i] - t[i - 1] + hi[i]
            S[j] += t[i - 1]
        L[i] = t[i] + lo[i]
        U[i] = t[i] + hi[i]
        S[i] = 0
        best, arg = None, None
        for j in range(i + 1):
            val = S[j] + max(t[j] - distance_to_multiple(L[j], U[j], period), 0) + opt[j]
            if best is None or val > best:
                best, arg = val, j
        opt[i + 1], choice[i + 1] = best, arg
    blocks = []
    i = n
    while i > 0:
        j = choice[i]
        blocks.append((j, i - 1))
        i = j
    blocks.reverse()
    return opt[n], _merge_tied_blocks(blocks, t, lo, hi, period)


def _block_value(t, lo, hi, period, s, l):
    L, U = _block_bounds(t, lo, hi, s, l)
    return sum(t[s:l]) + max(t[s] - distance_to_multiple(L, U, period), 0)


def _merge_tied_blocks(blocks, t, lo, hi, period):
    # adjacent blocks that share a boundary time cross each other; merging
    # them never loses overlap
    out = [blocks[0]] if blocks else []
    for s, l in blocks[1:]:
        ps, pl = out[-1]
        if t[pl] >= t[s]:
            merged = _block_value(t, lo, hi, period, ps, l)
            apart = _block_value(t, lo, hi, period, ps, pl) + _block_value(t, lo, hi, period, s, l)
            if merged >= apart:
                out[-1] = (ps, l)
                continue
        out.append((s, l))
    return out


def blocks_cross(blocks, t) -> bool:
    """Whether any two blocks of sorted trains form crossing cycles."""
    ranges = sorted((t[s], t[l]) for s, l in blocks)
    return any(ranges[k][1] >= ranges[k + 1][0] for k in range(len(ranges) - 1))


def solve_equal_times_dp(instance: Instance) -> Solution:
    """Optimal overlap when every train accelerates exactly as long as it brakes."""
    st = _require_energy_view(instance)
    _require_all(st)
    if st.ac != st.br:
        raise PreconditionError("acceleration and braking times differ on some line")
    order = sorted(range(st.n), key=lambda k: (st.ac[k], k))
    t = [st.ac[k] for k in order]
    lo = [st.lo[k] for k in order]
    hi = [st.hi[k] for k in order]
    _, blocks = equal_times_blocks(t, lo, hi, instance.period)
    pairs = []
    for s, l in blocks:
        pairs.append((order[s], order[l]))
        pairs.extend((order[i], order[i - 1]) for i in range(s + 1, l + 1))
    return solve_with_matching(instance, st.ids(pairs))


def equal_times_partition(instance: Instance) -> list[tuple[int, int]]:
    """Blocks chosen by :func:`solve_equal_times_dp`, as ranks in sorted order."""
    st = _require_energy_view(instance)
    order = sorted(range(st.n), key=lambda k: (st.ac[k], k))
    t = [st.ac[k] for k in order]
    return equal_times_blocks(t, [st.lo[k] for k in order], [st.hi[k] for k in order], instance.period)[1]


# ---------------------------------------------------------------------------
# dispatch

EXACT_EVENT_LIMIT = 12
EXACT_PERIOD_LIMIT = 60


class Method(str, enum.Enum):
    FREE = "free"
    UNIFORM = "uniform"
    DP = "dp"
    LARGE_PERIOD = "large-period"
    EXACT = "exact"
    MERGE = "merge"
    HAMILTONIAN = "hamiltonian"


def dispatch(instance: Instance, time_limit: float | None = None) -> DispatchResult:
    """Pick the strongest applicable method for maximizing overlap.

    Order: free waits, uniform times, equal times, large period, exact
    search within size limits, and finally the merge heuristic with the
    bracket ``[Hamiltonian path weight, matching weight]``.
    """
    st = _require_energy_view(instance)
    upper = max_weight_matching(instance).weight
    T = instance.period

    def exact(sol, method):
        return DispatchResult(sol, method.value, sol.total_overlap, sol.total_overlap, True)

    if all(h - l >= T - 1 for l, h in zip(st.lo, st.hi)):
        return exact(solve_free_waiting(instance), Method.FREE)
    if st.all_arcs:
        if len(set(st.ac)) == 1 or len(set(st.br)) == 1:
            return exact(solve_uniform_times(instance), Method.UNIFORM)
        if st.ac == st.br:
            return exact(solve_equal_times_dp(instance), Method.DP)
        if T >= large_period_threshold(instance):
            return exact(solve_large_period(instance), Method.LARGE_PERIOD)
    if len(instance.events) <= EXACT_EVENT_LIMIT and T <= EXACT_PERIOD_LIMIT:
        res = solve_exact(SolveRequest(instance, Objective.MAX_OVERLAP, time_limit=time_limit))
        if res.status is Status.OPTIMAL:
            return exact(res.solution, Method.EXACT)
        if not st.all_arcs and res.solution is not None:
            return DispatchResult(res.solution, Method.EXACT.value, res.solution.total_overlap, upper, False)
    if not st.all_arcs:
        raise PreconditionError("restricted energy arcs beyond the exact-search limits")
    report = merge_heuristic(instance)
    sol = solve_with_matching(instance, report.matching)
    lower = max(hamiltonian_path_weight(instance, report.matching), sol.total_overlap)
    return DispatchResult(sol, Method.MERGE.value, lower, upper, lower == upper)


def solve_by_method(instance: Instance, method: str, time_limit: float | None = None) -> DispatchResult:
    """Run one named method (``auto`` defers to :func:`dispatch`)."""
    if method == "auto":
        return dispatch(instance, time_limit)
    m = Method(method)
    upper = max_weight_matching(instance).weight
    if m is Method.EXACT:
        res = solve_exact(SolveRequest(instance, Objective.MAX_OVERLAP, time_limit=time_limit))
        if res.solution is None:
            raise PreconditionError(f"exact search ended with status {res.status.value}")
        ok = res.status is Status.OPTIMAL
        return DispatchResult(res.solution, m.value, res.solution.total_overlap,
                              res.solution.total_overlap if ok else upper, ok)
    if m in (Method.MERGE, Method.HAMILTONIAN):
        report = merge_heuristic(instance) if m is Method.MERGE else max_weight_hamiltonian_cycle(instance)
        sol = solve_with_matching(instance, report.matching)
        lower = max(hamiltonian_path_weight(instance, report.matching), sol.total_overlap)
        return DispatchResult(sol, m.value, lower, upper, lower == upper)
    solver = {
        Method.FREE: solve_free_waiting,
        Method.UNIFORM: solve_uniform_times,
        Method.DP: solve_equal_times_dp,
        Method.LARGE_PERIOD: solve_large_period,
    }[m]
    sol = solver(instance)
    return DispatchResult(sol, m.value, sol.total_overlap, sol.total_overlap, True)
