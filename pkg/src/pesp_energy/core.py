"""Event-activity networks, periodic tensions and brake-traction overlaps.

Times, bounds and overlaps are integers in model units; passenger weights are
exact :class:`fractions.Fraction` values so objective comparisons never hit
floating-point ties.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

Timetable = dict[str, int]
Matching = frozenset[str]


class EventKind(str, enum.Enum):
    ARRIVAL = "arr"
    DEPARTURE = "dep"


class ActivityKind(str, enum.Enum):
    WAIT = "wait"
    DRIVE = "drive"
    TRANSFER = "transfer"
    ENERGY = "energy"
    HEADWAY = "headway"


class InfeasibleTimetableError(ValueError):
    """A timetable violates the bounds of some activity."""

    def __init__(self, activity_id: str, tension: int, lower: int, upper: int):
        self.activity_id = activity_id
        super().__init__(
            f"activity {activity_id!r}: tension {tension} outside [{lower}, {upper}]"
        )


@dataclass(frozen=True)
class Event:
    id: str
    kind: EventKind
    line: str
    station: str
    brake_time: int | None = None
    accel_time: int | None = None

    @property
    def is_arrival(self) -> bool:
        return self.kind is EventKind.ARRIVAL


@dataclass(frozen=True)
class Activity:
    id: str
    kind: ActivityKind
    tail: str
    head: str
    lower: int
    upper: int
    weight: Fraction = Fraction(0)

    def is_free(self, period: int) -> bool:
        return self.upper - self.lower >= period - 1


@dataclass(frozen=True)
class Instance:
    """A periodic event-activity network with period ``period``."""

    period: int
    events: tuple[Event, ...]
    activities: tuple[Activity, ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "activities", tuple(self.activities))

    @cached_property
    def event(self) -> dict[str, Event]:
        return {e.id: e for e in self.events}

    @cached_property
    def activity(self) -> dict[str, Activity]:
        return {a.id: a for a in self.activities}

    @cached_property
    def energy_arcs(self) -> tuple[Activity, ...]:
        return tuple(a for a in self.activities if a.kind is ActivityKind.ENERGY)

    @cached_property
    def wait_arcs(self) -> tuple[Activity, ...]:
        return tuple(a for a in self.activities if a.kind is ActivityKind.WAIT)

    def t_min(self, arc: Activity | str) -> int:
        """Smaller of the acceleration and braking time on an energy arc."""
        arc = self._arc(arc)
        return min(self.event[arc.tail].accel_time, self.event[arc.head].brake_time)

    def t_max(self, arc: Activity | str) -> int:
        arc = self._arc(arc)
        return max(self.event[arc.tail].accel_time, self.event[arc.head].brake_time)

    def _arc(self, arc: Activity | str) -> Activity:
        return self.activity[arc] if isinstance(arc, str) else arc


@dataclass(frozen=True)
class Solution:
    matching: Matching
    timetable: Timetable
    tensions: dict[str, int]
    overlaps: dict[str, int]
    travel_time: Fraction
    total_overlap: int


@dataclass(frozen=True)
class Violation:
    element: str
    rule: str
    code: str = "structure"

    def __str__(self) -> str:
        return f"{self.element}: {self.rule}"


@dataclass(frozen=True)
class Component:
    """A connected piece of the graph formed by waits and selected energy arcs.

    ``arcs`` lists activity ids in traversal order; ``events`` lists the
    visited events in the same order.
    """

    events: tuple[str, ...]
    arcs: tuple[str, ...]
    is_cycle: bool


@dataclass(frozen=True)
class CycleStats:
    cycle_arcs: tuple[str, ...]
    low_sum: int
    high_sum: int
    delta: int
    min_energy_arc: str


# ---------------------------------------------------------------------------
# validation

# Breaking this rule only changes the geometric reading of the overlap
# formula, not the optimization model, so solvers tolerate it.
PHASE_RULE = "phase-length"


def validate_instance(instance: Instance) -> list[Violation]:
    """Return every broken structural rule; an empty list means the instance is valid."""
    out: list[Violation] = []
    T = instance.period
    if not isinstance(T, int) or T <= 0:
        out.append(Violation("period", f"must be a positive integer, got {T!r}"))
        return out

    seen: set[str] = set()
    for e in instance.events:
        if e.id in seen:
            out.append(Violation(e.id, "duplicate event id"))
        seen.add(e.id)
        if e.kind is EventKind.ARRIVAL:
            if e.brake_time is None or e.brake_time <= 0:
                out.append(Violation(e.id, "arrival needs brake_time > 0"))
            if e.accel_time is not None:
                out.append(Violation(e.id, "arrival must not carry accel_time"))
        else:
            if e.accel_time is None or e.accel_time <= 0:
                out.append(Violation(e.id, "departure needs accel_time > 0"))
            if e.brake_time is not None:
                out.append(Violation(e.id, "departure must not carry brake_time"))

    ev = instance.event
    seen = set()
    for a in instance.activities:
        if a.id in seen:
            out.append(Violation(a.id, "duplicate activity id"))
        seen.add(a.id)
        if a.tail not in ev or a.head not in ev:
            out.append(Violation(a.id, "endpoint refers to unknown event"))
            continue
        if not 0 <= a.lower <= T - 1:
            out.append(Violation(a.id, f"lower bound must lie in [0, {T - 1}]"))
        if not a.lower <= a.upper <= a.lower + T - 1:
            out.append(Violation(a.id, "upper bound must lie in [lower, lower + T - 1]"))
        if a.weight < 0:
            out.append(Violation(a.id, "weight must be nonnegative"))
        tail, head = ev[a.tail], ev[a.head]
        out.extend(_kind_rules(a, tail, head, T))

    out.extend(_wait_matching_rules(instance))
    return out


def blocking_violations(instance: Instance) -> list[Violation]:
    """Violations that make the instance unusable for the solvers."""
    return [v for v in validate_instance(instance) if v.code != PHASE_RULE]


def _kind_rules(a: Activity, tail: Event, head: Event, T: int) -> list[Violation]:
    out = []
    dep_to_arr = tail.kind is EventKind.DEPARTURE and head.kind is EventKind.ARRIVAL
    arr_to_dep = tail.kind is EventKind.ARRIVAL and head.kind is EventKind.DEPARTURE
    if a.kind is ActivityKind.ENERGY:
        if not dep_to_arr:
            out.append(Violation(a.id, "energy arc must run from a departure to an arrival"))
        else:
            if tail.station != head.station:
                out.append(Violation(a.id, "energy arc must stay within one station"))
            if tail.accel_time and head.brake_time and tail.accel_time + head.brake_time >= T:
                out.append(Violation(a.id, "accel_time + brake_time must be < period", PHASE_RULE))
        if a.lower != 0 or a.upper != T - 1:
            out.append(Violation(a.id, "energy arc bounds must be [0, T - 1]"))
        if a.weight != 0:
            out.append(Violation(a.id, "energy arc weight must be 0"))
    elif a.kind is ActivityKind.TRANSFER:
        if not arr_to_dep or tail.station != head.station:
            out.append(Violation(a.id, "transfer must join an arrival to a departure at one station"))
        elif tail.line == head.line:
            out.append(Violation(a.id, "transfer must connect two different lines"))
        if a.upper != a.lower + T - 1:
            out.append(Violation(a.id, "transfer must be free (upper = lower + T - 1)"))
    elif a.kind is ActivityKind.WAIT:
        if not arr_to_dep:
            out.append(Violation(a.id, "wait must run from an arrival to a departure"))
        elif tail.line != head.line or tail.station != head.station:
            out.append(Violation(a.id, "wait must stay on one line at one station"))
    elif a.kind is ActivityKind.DRIVE:
        if not dep_to_arr:
            out.append(Violation(a.id, "drive must run from a departure to an arrival"))
        elif tail.line != head.line:
            out.append(Violation(a.id, "drive must stay on one line"))
    elif a.kind is ActivityKind.HEADWAY:
        if a.weight != 0:
            out.append(Violation(a.id, "headway weight must be 0"))
    return out


def _wait_matching_rules(instance: Instance) -> list[Violation]:
    out = []
    ev = instance.event
    groups: dict[tuple[str, str], dict[str, list[str]]] = {}
    for e in instance.events:
        groups.setdefault((e.line, e.station), {"arr": [], "dep": []})[e.kind.value].append(e.id)
    used: dict[str, str] = {}
    for a in instance.wait_arcs:
        for end in (a.tail, a.head):
            if end in used:
                out.append(Violation(a.id, f"event {end!r} already covered by wait {used[end]!r}"))
            used.setdefault(end, a.id)
    for (line, station), g in sorted(groups.items()):
        if len(g["arr"]) != len(g["dep"]):
            continue  # terminal stops carry only one side
        for eid in g["arr"] + g["dep"]:
            if eid not in used and eid in ev:
                out.append(Violation(eid, f"no wait arc for line {line!r} at station {station!r}"))
    return out


# ---------------------------------------------------------------------------
# periodic arithmetic


def tension(instance: Instance, timetable: Mapping[str, int], activity: Activity | str) -> int:
    """Periodic tension ``(pi_head - pi_tail - l) mod T + l`` of one activity."""
    a = instance._arc(activity)
    try:
        tail, head = timetable[a.tail], timetable[a.head]
    except KeyError as exc:
        raise KeyError(f"event {exc.args[0]!r} of activity {a.id!r} is not scheduled") from None
    return (head - tail - a.lower) % instance.period + a.lower


def overlap_of_tension(x: int, t_min: int, t_max: int) -> int:
    """Brake-traction overlap realized on an energy arc with tension ``x``."""
    if not 0 < t_min <= t_max:
        raise ValueError(f"need 0 < t_min <= t_max, got {t_min}, {t_max}")
    if x < 0:
        raise ValueError(f"tension must be nonnegative, got {x}")
    return max(min(x, t_min, t_max + t_min - x), 0)


def overlap_oracle(pi_dep: int, pi_arr: int, t_ac: int, t_br: int, period: int) -> int:
    """Measure the intersection of the acceleration and braking windows on the circle.

    Works directly on the two periodic intervals ``[pi_dep, pi_dep + t_ac]`` and
    ``[pi_arr - t_br, pi_arr]`` by unrolling one of them over neighbouring
    periods; used to cross-check :func:`overlap_of_tension`.
    """
    if t_ac + t_br >= period:
        raise ValueError("t_ac + t_br must be smaller than the period")
    a0 = pi_dep % period
    a1 = a0 + t_ac
    b0 = (pi_arr - t_br) % period
    total = 0
    for shift in (-period, 0, period):
        lo = max(a0, b0 + shift)
        hi = min(a1, b0 + t_br + shift)
        total += max(hi - lo, 0)
    return total


def distance_to_multiple(low: int, high: int, period: int) -> int:
    """Distance between ``[low, high]`` and the nearest integer multiple of ``period``."""
    below = low - period * (low // period)
    if below == 0 or period * (low // period) + period <= high:
        return 0
    above = period * (-(-low // period)) - high
    return min(below, above)


# ---------------------------------------------------------------------------
# evaluation


def evaluate(instance: Instance, matching: Iterable[str], timetable: Mapping[str, int]) -> Solution:
    """Compute tensions, overlaps and both objectives of a (matching, timetable) pair.

    Raises :class:`InfeasibleTimetableError` for the first activity whose
    tension leaves its bounds.
    """
    T = instance.period
    matching = frozenset(matching)
    for eid in instance.event:
        if eid not in timetable:
            raise KeyError(f"event {eid!r} is not scheduled")
        if not 0 <= timetable[eid] < T:
            raise ValueError(f"time of event {eid!r} must lie in [0, {T})")
    _check_matching(instance, matching)

    tensions = {}
    travel = Fraction(0)
    for a in instance.activities:
        x = tension(instance, timetable, a)
        if x > a.upper:
            raise InfeasibleTimetableError(a.id, x, a.lower, a.upper)
        tensions[a.id] = x
        travel += a.weight * x
    overlaps = {
        aid: overlap_of_tension(tensions[aid], instance.t_min(aid), instance.t_max(aid))
        for aid in sorted(matching)
    }
    return Solution(
        matching=matching,
        timetable=dict(timetable),
        tensions=tensions,
        overlaps=overlaps,
        travel_time=travel,
        total_overlap=sum(overlaps.values()),
    )


def _check_matching(instance: Instance, matching: frozenset[str]) -> None:
    tails, heads = set(), set()
    for aid in matching:
        a = instance.activity.get(aid)
        if a is None or a.kind is not ActivityKind.ENERGY:
            raise ValueError(f"{aid!r} is not an energy activity")
        if a.tail in tails or a.head in heads:
            raise ValueError(f"energy arc {aid!r} breaks the matching property")
        tails.add(a.tail)
        heads.add(a.head)


# ---------------------------------------------------------------------------
# cycle structure


def decompose(instance: Instance, matching: Iterable[str]) -> list[Component]:
    """Split ``waits + matching`` into node-disjoint directed cycles and paths."""
    matching = frozenset(matching)
    _check_matching(instance, matching)
    succ: dict[str, tuple[str, str]] = {}
    has_pred: set[str] = set()
    for a in instance.wait_arcs:
        succ[a.tail] = (a.id, a.head)
        has_pred.add(a.head)
    for aid in sorted(matching):
        a = instance.activity[aid]
        succ[a.tail] = (aid, a.head)
        has_pred.add(a.head)

    seen: set[str] = set()
    comps = []
    for start in sorted(instance.event):
        if start in seen or start in has_pred:
            continue
        comps.append(_walk(start, succ, seen, cycle=False))
    for start in sorted(instance.event):
        if start not in seen:
            comps.append(_walk(start, succ, seen, cycle=True))
    comps.sort(key=lambda c: min(c.events))
    return comps


def _walk(start: str, succ: dict, seen: set, cycle: bool) -> Component:
    events, arcs = [start], []
    seen.add(start)
    cur = start
    while cur in succ:
        aid, nxt = succ[cur]
        arcs.append(aid)
        if nxt == start:
            break
        events.append(nxt)
        seen.add(nxt)
        cur = nxt
    return Component(tuple(events), tuple(arcs), cycle)


def cycle_stats(instance: Instance, cycle: Component) -> CycleStats:
    """Full-overlap interval ``[L_C, U_C]`` of a cycle and its distance to ``T*Z``."""
    if not cycle.is_cycle:
        raise ValueError("cycle_stats needs a cycle component, got a path")
    low = high = 0
    energy = []
    for aid in cycle.arcs:
        a = instance.activity[aid]
        if a.kind is ActivityKind.ENERGY:
            low += instance.t_min(a)
            high += instance.t_max(a)
            energy.append(a)
        else:
            low += a.lower
            high += a.upper
    if not energy:
        raise ValueError("cycle carries no energy arc")
    a0 = min(energy, key=lambda a: (instance.t_min(a), a.id))
    return CycleStats(
        cycle_arcs=cycle.arcs,
        low_sum=low,
        high_sum=high,
        delta=distance_to_multiple(low, high, instance.period),
        min_energy_arc=a0.id,
    )


def component_tensions(instance: Instance, component: Component) -> dict[str, int]:
    """Tensions maximizing the overlap on one component (see :func:`build_cycle_timetable`)."""
    T = instance.period
    arcs = [instance.activity[aid] for aid in component.arcs]
    is_energy = [a.kind is ActivityKind.ENERGY for a in arcs]
    low = {a.id: instance.t_min(a) if e else a.lower for a, e in zip(arcs, is_energy)}
    if not component.is_cycle:
        return low
    high = {a.id: instance.t_max(a) if e else a.upper for a, e in zip(arcs, is_energy)}
    st = cycle_stats(instance, component)
    L, delta = st.low_sum, st.delta
    if delta == 0:
        # lift arcs in traversal order until the cycle sum hits a multiple of T
        slack = -L % T
        x = dict(low)
        for a in arcs:
            step = min(slack, high[a.id] - low[a.id])
            x[a.id] += step
            slack -= step
        return x
    a0 = st.min_energy_arc
    if L - T * (L // T) == delta:
        x = dict(low)
        x[a0] = (low[a0] - delta) % T
    else:
        x = dict(high)
        x[a0] = (high[a0] + delta) % T
    return x


def build_cycle_timetable(instance: Instance, matching: Iterable[str], component: Component) -> Timetable:
    """Times for the events of ``component`` that realize its maximum overlap.

    Cycles get the lower (or, when the period multiple sits above the
    full-overlap interval, the upper) end of every bound with the whole loss
    pushed onto the energy arc of smallest ``t_min``; paths get full overlap
    on every energy arc.  The smallest event id of the component sits at 0.
    """
    del matching  # the component already fixes which energy arcs are used
    T = instance.period
    x = component_tensions(instance, component)
    rel = {component.events[0]: 0}
    for aid in component.arcs:
        a = instance.activity[aid]
        if a.head not in rel:
            rel[a.head] = rel[a.tail] + x[aid]
    anchor = rel[min(component.events)]
    return {eid: (t - anchor) % T for eid, t in rel.items()}


def component_overlap(instance: Instance, component: Component) -> int:
    """Maximum overlap achievable on one component for its fixed energy arcs."""
    x = component_tensions(instance, component)
    return sum(
        overlap_of_tension(x[aid], instance.t_min(aid), instance.t_max(aid))
        for aid in component.arcs
        if instance.activity[aid].kind is ActivityKind.ENERGY
    )


def build_basel_timetable(instance: Instance, arr_time: int) -> Timetable:
    """Schedule every arrival at ``arr_time`` and every departure ``l_max`` later."""
    stations = {e.station for e in instance.events}
    if len(stations) > 1:
        raise ValueError("the Basel structure is defined for one-station networks only")
    T = instance.period
    l_max = max((a.lower for a in instance.activities), default=0)
    times = {
        e.id: arr_time % T if e.is_arrival else (arr_time + l_max) % T
        for e in instance.events
    }
    for a in instance.activities:
        if a.kind is ActivityKind.ENERGY:
            continue
        x = tension(instance, times, a)
        if x > a.upper:
            raise InfeasibleTimetableError(a.id, x, a.lower, a.upper)
    return times
