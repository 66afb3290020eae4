"""Exact solvers for the bicriteria energy/travel-time timetabling problem.

:func:`solve_exact` is a depth-first branch and bound over event times.
:func:`brute_force` enumerates every timetable and every matching and is
meant as an independent oracle on tiny instances.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import (
    ActivityKind,
    Instance,
    Solution,
    evaluate,
    overlap_of_tension,
    blocking_violations,
)
from .lpexport import ModelExport, export_lp  # noqa: F401  (part of this module's surface)
from .matching import max_weight_matching


class Objective(str, enum.Enum):
    MIN_TRAVEL = "min-travel"
    MAX_OVERLAP = "max-overlap"


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    LIMIT_REACHED = "limit-reached"


class GuardError(ValueError):
    """The instance is too large for an enumeration oracle."""


@dataclass(frozen=True)
class SolveRequest:
    instance: Instance
    objective: Objective = Objective.MIN_TRAVEL
    overlap_floor: int = 0
    time_limit: float | None = None
    node_limit: int | None = None


@dataclass(frozen=True)
class SolveResult:
    status: Status
    solution: Solution | None
    bound: Fraction | int | None
    nodes: int
    objective: Objective = Objective.MIN_TRAVEL

    @property
    def value(self):
        """Objective value of the returned solution, or ``None``."""
        if self.solution is None:
            return None
        if self.objective is Objective.MIN_TRAVEL:
            return self.solution.travel_time
        return self.solution.total_overlap


_BIG = 1 << 40


def _energy_pairs(instance: Instance) -> list:
    """Energy arcs deduplicated by endpoints (parallel copies behave identically)."""
    seen = {}
    for a in sorted(instance.energy_arcs, key=lambda a: a.id):
        seen.setdefault((a.tail, a.head), a)
    return list(seen.values())


def _overlap_table(instance: Instance, arc) -> list[int]:
    lo, hi = instance.t_min(arc), instance.t_max(arc)
    return [overlap_of_tension(x, lo, hi) for x in range(instance.period)]


def _components(ids: list[str], instance: Instance) -> dict[str, str]:
    parent = {e: e for e in ids}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for a in instance.activities:
        ra, rb = find(a.tail), find(a.head)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return {e: find(e) for e in ids}


def branching_order(instance: Instance) -> list[str]:
    """Events by decreasing total weight of incident activities, ties by id."""
    load = {e.id: Fraction(0) for e in instance.events}
    for a in instance.activities:
        load[a.tail] += a.weight
        load[a.head] += a.weight
    return sorted(load, key=lambda e: (-load[e], e))


def _scaled_weights(instance: Instance) -> tuple[int, dict[str, int]]:
    scale = 1
    for a in instance.activities:
        scale = math.lcm(scale, a.weight.denominator)
    return scale, {a.id: int(a.weight * scale) for a in instance.activities}


class _Search:
    def __init__(self, req: SolveRequest):
        inst = req.instance
        self.inst = inst
        self.T = T = inst.period
        self.objective = req.objective
        self.floor = req.overlap_floor
        self.node_limit = req.node_limit
        self.deadline = None if req.time_limit is None else time.perf_counter() + req.time_limit

        order = branching_order(inst)
        self.order = order
        n = self.n = len(order)
        pos = {e: k for k, e in enumerate(order)}
        self.scale, iw = _scaled_weights(inst)

        # pairwise cost tables indexed [value of earlier event, value of later event]
        rows = np.zeros((n, T, n, T), dtype=np.int64)
        self.root_cost = 0
        self.loop_cost = 0
        values = np.arange(T)
        diff = (values[None, :] - values[:, None])  # head - tail with tail on axis 0
        for a in inst.activities:
            if a.kind is ActivityKind.ENERGY:
                continue
            w = iw[a.id]
            if a.is_free(T) and w == 0:
                continue
            self.root_cost += w * a.lower
            d = (diff - a.lower) % T
            m = np.where(d <= a.upper - a.lower, w * d, _BIG)  # axis 0: tail, axis 1: head
            pt, ph = pos[a.tail], pos[a.head]
            if pt == ph:
                # a loop has the constant tension (-l) mod T + l
                self.loop_cost += int(m[0, 0])
                continue
            if pt > ph:
                pt, ph, m = ph, pt, m.T
            rows[pt, :, ph, :] += m
        self.rows = np.minimum(rows, _BIG)

        comp = _components(order, inst)
        self.anchor = set()
        seen = set()
        for e in order:
            if comp[e] not in seen:
                seen.add(comp[e])
                self.anchor.add(pos[e])

        # energy arcs: e1 is the endpoint branched on first
        pairs = _energy_pairs(inst)
        self.energy_ids = [a.id for a in pairs]
        deps = sorted({a.tail for a in pairs})
        arrs = sorted({a.head for a in pairs})
        self.nd, self.na = len(deps), len(arrs)
        self.e_dep = np.array([deps.index(a.tail) for a in pairs], dtype=np.intp)
        self.e_arr = np.array([arrs.index(a.head) for a in pairs], dtype=np.intp)
        self.e_tmin = np.array([inst.t_min(a) for a in pairs], dtype=np.int64)
        e1, e2, tables = [], [], []
        for a in pairs:
            ov = np.array(_overlap_table(inst, a), dtype=np.int64)
            pj, pi = pos[a.tail], pos[a.head]
            g = ov[(values[None, :] - values[:, None]) % T]  # [v_dep, v_arr]
            if pj < pi:
                e1.append(pj), e2.append(pi), tables.append(g)
            else:
                e1.append(pi), e2.append(pj), tables.append(g.T)
        self.e2 = np.array(e2, dtype=np.intp)
        self.first_arcs = []
        for k in range(n):
            idx = [t for t, p in enumerate(e1) if p == k]
            stack = np.stack([tables[t] for t in idx]) if idx else None
            self.first_arcs.append((np.array(idx, dtype=np.intp), stack))

        self.nodes = 0
        self.limit_hit = False
        self.best_val = None
        self.best_tt = None

    # -- bounds -------------------------------------------------------------

    def _overlap_matrix(self, C, OVR):
        dom = C[self.e2] < _BIG
        b = np.where(dom, OVR, 0).max(axis=1)
        B = np.zeros((self.nd, self.na), dtype=np.int64)
        B[self.e_dep, self.e_arr] = b
        return B

    @staticmethod
    def _matching_value(B) -> int:
        if B.size == 0:
            return 0
        r, c = linear_sum_assignment(B, maximize=True)
        return int(B[r, c].sum())

    def _overlap_ub(self, B, need: int) -> int:
        """Upper bound on achievable overlap; exact matching only when the cheap one is loose."""
        if B.size == 0:
            return 0
        cheap = int(min(B.max(axis=1).sum(), B.max(axis=0).sum()))
        if cheap < need:
            return cheap
        return self._matching_value(B)

    # -- search -------------------------------------------------------------

    def run(self):
        n, T = self.n, self.T
        C = np.zeros((n, T), dtype=np.int64)
        for k in self.anchor:
            C[k, 1:] = _BIG
        OVR = np.repeat(self.e_tmin[:, None], T, axis=1)
        self.root_overlap_ub = 0
        if self.loop_cost >= _BIG:
            self.root_bound = None
            return
        B = self._overlap_matrix(C, OVR)
        self.root_overlap_ub = self._matching_value(B)
        self.root_bound = (
            Fraction(self.root_cost + self.loop_cost, self.scale)
            if self.objective is Objective.MIN_TRAVEL
            else self.root_overlap_ub
        )
        if self.floor > self.root_overlap_ub:
            return
        self.assign = [0] * n
        self._dfs(0, C, OVR, self.loop_cost)

    def _target_overlap(self) -> int:
        if self.objective is Objective.MAX_OVERLAP:
            need = self.floor if self.best_val is None else self.best_val + 1
            return max(need, 0)
        return self.floor

    def _dfs(self, k, C, OVR, fixed):
        # all children of this node are bounded in one vectorized pass
        n = self.n
        cand = np.flatnonzero(C[k] < _BIG)
        m = len(cand)
        Cn = C[None, :, :] + self.rows[k, cand]
        Cn[:, k, :] = _BIG
        Cn[np.arange(m), k, cand] = 0
        cost = fixed + C[k, cand]
        if k + 1 < n:
            mins = Cn[:, k + 1 :, :].min(axis=2)
            alive = (mins < _BIG).all(axis=1)
            lb = cost + mins.sum(axis=1)
        else:
            alive = np.ones(m, dtype=bool)
            lb = cost
        idx, stack = self.first_arcs[k]
        OVn = np.repeat(OVR[None], m, axis=0)
        if len(idx):
            OVn[:, idx, :] = stack[:, cand, :].transpose(1, 0, 2)
        B = np.zeros((m, self.nd, self.na), dtype=np.int64)
        if self.nd:
            dom = Cn[:, self.e2, :] < _BIG
            b = np.where(dom, OVn, 0).max(axis=2)
            B[:, self.e_dep, self.e_arr] = b
            cheap = np.minimum(B.max(axis=2).sum(axis=1), B.max(axis=1).sum(axis=1))
        else:
            cheap = np.zeros(m, dtype=np.int64)
        cand, alive, lb, cost, cheap = cand.tolist(), alive.tolist(), lb.tolist(), cost.tolist(), cheap.tolist()
        travel = self.objective is Objective.MIN_TRAVEL
        for t in range(m):
            if self.limit_hit or self._done():
                return
            self.nodes += 1
            if self.node_limit is not None and self.nodes > self.node_limit:
                self.limit_hit = True
                return
            if self.deadline is not None and (self.nodes & 63) == 0 and time.perf_counter() > self.deadline:
                self.limit_hit = True
                return
            if not alive[t]:
                continue
            if travel and self.best_val is not None and lb[t] >= self.best_val:
                continue
            need = self._target_overlap()
            if need > 0 and (cheap[t] < need or self._matching_value(B[t]) < need):
                continue
            self.assign[k] = cand[t]
            if k + 1 == n:
                self._leaf(cost[t], B[t])
            else:
                self._dfs(k + 1, Cn[t], OVn[t], cost[t])

    def _leaf(self, cost, B):
        ov = self._matching_value(B)
        if ov < self.floor:
            return
        if self.objective is Objective.MIN_TRAVEL:
            if self.best_val is None or cost < self.best_val:
                self.best_val, self.best_tt = cost, list(self.assign)
        elif self.best_val is None or ov > self.best_val:
            self.best_val, self.best_tt = ov, list(self.assign)

    def _done(self) -> bool:
        return (
            self.objective is Objective.MAX_OVERLAP
            and self.best_val is not None
            and self.best_val >= self.root_overlap_ub
        )

    def timetable(self) -> dict[str, int]:
        return {e: self.best_tt[k] for k, e in enumerate(self.order)}


def best_matching(instance: Instance, timetable: dict[str, int]) -> frozenset[str]:
    """A maximum-overlap matching for a fixed timetable."""
    T = instance.period
    edges = []
    for a in _energy_pairs(instance):
        x = (timetable[a.head] - timetable[a.tail]) % T
        edges.append((a.id, a.tail, a.head, overlap_of_tension(x, instance.t_min(a), instance.t_max(a))))
    chosen, _ = max_weight_matching(edges)
    return frozenset(chosen)


def solve_exact(request: SolveRequest) -> SolveResult:
    """Solve one scalarized problem to proven optimality (or up to a limit).

    MinTravel minimizes weighted travel time subject to total overlap at
    least ``overlap_floor``; MaxOverlap maximizes total overlap. Ties are
    broken toward the lexicographically smallest vector of event times taken
    in branching order.
    """
    inst = request.instance
    problems = blocking_violations(inst)
    if problems:
        raise ValueError(f"invalid instance: {problems[0]}")
    if request.overlap_floor < 0:
        raise ValueError("overlap_floor must be nonnegative")
    s = _Search(request)
    s.run()
    sol = None
    if s.best_tt is not None:
        tt = s.timetable()
        sol = evaluate(inst, best_matching(inst, tt), tt)
    if s.limit_hit:
        return _result(Status.LIMIT_REACHED, sol, s.root_bound, s.nodes, request.objective)
    if sol is None:
        return _result(Status.INFEASIBLE, None, None, s.nodes, request.objective)
    value = sol.travel_time if request.objective is Objective.MIN_TRAVEL else sol.total_overlap
    return _result(Status.OPTIMAL, sol, value, s.nodes, request.objective)


def _result(status, sol, bound, nodes, objective) -> SolveResult:
    return SolveResult(status, sol, bound, nodes, objective)


# ---------------------------------------------------------------------------
# enumeration oracle


def _all_matchings(n_dep: int, arcs: list[tuple[int, int]]) -> list[list[int]]:
    """Every matching (including the empty one) as a list of arc indices."""
    out = []

    def rec(start, used_d, used_a, cur):
        out.append(list(cur))
        for t in range(start, len(arcs)):
            d, a = arcs[t]
            if d in used_d or a in used_a:
                continue
            cur.append(t)
            rec(t + 1, used_d | {d}, used_a | {a}, cur)
            cur.pop()

    rec(0, frozenset(), frozenset(), [])
    return out


def enumerate_outcomes(instance: Instance, max_events: int = 8, max_period: int = 12):
    """Every feasible timetable with its travel time and best achievable overlap.

    One event per connected component sits at time 0. Returns
    ``(timetables, travel, overlap, order)`` where ``timetables`` is an
    integer array with one row per feasible timetable (columns follow
    ``order``), ``travel`` holds exact travel times scaled by the common
    weight denominator, and ``overlap`` the maximum over all matchings.
    """
    n, T = len(instance.events), instance.period
    if n > max_events or T > max_period:
        raise GuardError(f"enumeration guard: need |E| <= {max_events} and T <= {max_period}, got {n} and {T}")
    order = sorted(instance.event)
    pos = {e: k for k, e in enumerate(order)}
    comp = _components(order, instance)
    anchors = {pos[comp[e]] for e in order}

    tts = np.zeros((1, 0), dtype=np.int64)
    for k in range(n):
        vals = [0] if k in anchors else list(range(T))
        tts = np.concatenate(
            [np.hstack([tts, np.full((len(tts), 1), v, dtype=np.int64)]) for v in vals]
        )
        for a in instance.activities:
            if a.kind is ActivityKind.ENERGY or a.is_free(T):
                continue
            pt, ph = pos[a.tail], pos[a.head]
            if max(pt, ph) != k:
                continue
            x = (tts[:, ph] - tts[:, pt] - a.lower) % T + a.lower
            tts = tts[x <= a.upper]

    scale, iw = _scaled_weights(instance)
    travel = np.zeros(len(tts), dtype=np.int64)
    for a in instance.activities:
        x = (tts[:, pos[a.head]] - tts[:, pos[a.tail]] - a.lower) % T + a.lower
        travel += iw[a.id] * x

    energy = sorted(instance.energy_arcs, key=lambda a: a.id)
    deps = sorted({a.tail for a in energy})
    arrs = sorted({a.head for a in energy})
    ov_cols = np.zeros((len(tts), len(energy)), dtype=np.int64)
    for t, a in enumerate(energy):
        x = (tts[:, pos[a.head]] - tts[:, pos[a.tail]]) % T
        tmin, tmax = instance.t_min(a), instance.t_max(a)
        ov_cols[:, t] = np.maximum(np.minimum(np.minimum(x, tmin), tmax + tmin - x), 0)
    best = np.zeros(len(tts), dtype=np.int64)
    arcs = [(deps.index(a.tail), arrs.index(a.head)) for a in energy]
    for m in _all_matchings(len(deps), arcs):
        if m:
            best = np.maximum(best, ov_cols[:, m].sum(axis=1))
    return tts, travel, best, order, scale


def brute_force(request: SolveRequest) -> SolveResult:
    """Exhaustive oracle: all timetables (anchored per component) and all matchings.

    Refuses instances with more than 8 events or a period above 12.
    """
    inst = request.instance
    tts, travel, best, order, scale = enumerate_outcomes(inst)
    nodes = len(tts)
    if request.objective is Objective.MAX_OVERLAP:
        ok = np.flatnonzero(best >= request.overlap_floor)
        if not len(ok):
            return _result(Status.INFEASIBLE, None, None, nodes, request.objective)
        pick = ok[np.argmax(best[ok])]
    else:
        ok = np.flatnonzero(best >= request.overlap_floor)
        if not len(ok):
            return _result(Status.INFEASIBLE, None, None, nodes, request.objective)
        pick = ok[np.argmin(travel[ok])]
    tt = {e: int(tts[pick, k]) for k, e in enumerate(order)}
    sol = evaluate(inst, best_matching(inst, tt), tt)
    value = sol.travel_time if request.objective is Objective.MIN_TRAVEL else sol.total_overlap
    return _result(Status.OPTIMAL, sol, value, nodes, request.objective)


def brute_force_front(instance: Instance) -> list[tuple[int, Fraction]]:
    """All nondominated (overlap, travel) pairs by exhaustive enumeration."""
    _, travel, best, _, scale = enumerate_outcomes(instance)
    if not len(travel):
        return []
    pts = []
    top = int(best.max())
    for eps in range(top + 1):
        mask = best >= eps
        pts.append((eps, Fraction(int(travel[mask].min()), scale)))
    out = []
    for i, (o, t) in enumerate(pts):
        if i + 1 < len(pts) and pts[i + 1][1] <= t:
            continue
        out.append((o, t))
    return out


# ---------------------------------------------------------------------------
# energy-only one-station oracle


def _cycle_best_overlap(bounds: list[tuple[int, int]], tables: list[list[int] | None], T: int) -> int:
    """Exhaustive maximum of the summed arc overlaps over tension vectors with sum = 0 mod T."""
    NEG = -1
    best = [NEG] * T
    best[0] = 0
    for (lo, hi), tab in zip(bounds, tables):
        nxt = [NEG] * T
        for r in range(T):
            if best[r] < 0:
                continue
            for x in range(lo, hi + 1):
                gain = tab[x] if tab is not None else 0
                s = (r + x) % T
                if best[r] + gain > nxt[s]:
                    nxt[s] = best[r] + gain
        best = nxt
    return best[0]


def brute_force_energy(instance: Instance, max_lines: int = 6, max_period: int = 12) -> int:
    """Maximum total overlap of a one-station energy network by matching enumeration.

    Every matching is enumerated; each cycle of waits plus matched arcs is
    solved by exhaustive search over tension residues, each path gets full
    overlap. Only valid when all other activities are free, which holds for
    energy-only one-station networks.
    """
    T = instance.period
    waits = instance.wait_arcs
    if len(waits) > max_lines or T > max_period:
        raise GuardError(f"energy oracle guard: need n <= {max_lines} and T <= {max_period}")
    for a in instance.activities:
        if a.kind not in (ActivityKind.WAIT, ActivityKind.ENERGY) and not a.is_free(T):
            raise ValueError("energy oracle needs every non-wait activity to be free")
    energy = _energy_pairs(instance)
    wait_of_arr = {a.tail: a for a in waits}
    deps = sorted({a.tail for a in energy})
    arrs = sorted({a.head for a in energy})
    arcs = [(deps.index(a.tail), arrs.index(a.head)) for a in energy]
    cache: dict[tuple, int] = {}
    best = 0
    for m in _all_matchings(len(deps), arcs):
        succ = {energy[t].tail: energy[t] for t in m}
        total = 0
        in_cycle: set[str] = set()
        for t in m:
            a = energy[t]
            if a.id in in_cycle:
                continue
            chain, cur, closed = [a], a, False
            while True:
                w = wait_of_arr.get(cur.head)
                if w is None or w.head not in succ:
                    break
                cur = succ[w.head]
                if cur.id == a.id:
                    closed = True
                    break
                chain.append(cur)
            if not closed:
                total += instance.t_min(a)  # arc on a path: full overlap
                continue
            in_cycle.update(e.id for e in chain)
            key = tuple(sorted(e.id for e in chain))
            if key not in cache:
                bounds, tables = [], []
                for e in chain:
                    bounds.append((0, T - 1))
                    tables.append(_overlap_table(instance, e))
                    w = wait_of_arr[e.head]
                    bounds.append((w.lower, w.upper))
                    tables.append(None)
                cache[key] = _cycle_best_overlap(bounds, tables, T)
            total += cache[key]
        best = max(best, total)
    return best
