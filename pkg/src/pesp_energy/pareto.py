"""Pareto front between total overlap and weighted travel time.

The front is traced with an epsilon-constraint sweep: one MaxOverlap solve
fixes the range, then one MinTravel solve per integer overlap floor.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .core import Instance, Solution
from .solver import Objective, SolveRequest, SolveResult, Status, solve_exact


@dataclass(frozen=True)
class ParetoPoint:
    overlap: int
    travel_time: Fraction
    witness: Solution


@dataclass(frozen=True)
class ParetoFront:
    points: tuple[ParetoPoint, ...]

    def pairs(self) -> list[tuple[int, Fraction]]:
        return [(p.overlap, p.travel_time) for p in self.points]


class FrontError(RuntimeError):
    """A subordinate solve did not end optimally."""

    def __init__(self, eps, status):
        self.eps = eps
        self.status = status
        what = "the max-overlap solve" if eps is None else f"overlap floor {eps}"
        super().__init__(f"{what} ended with status {status.value}")


def _witness_key(w):
    if isinstance(w, Solution):
        return (0, tuple(sorted(w.timetable.items())), tuple(sorted(w.matching)))
    return (1, repr(w))


def dominance_filter(points: Iterable) -> ParetoFront:
    """Keep the nondominated points, sorted by overlap.

    Accepts :class:`ParetoPoint` objects or ``(overlap, travel, witness)``
    tuples. Among exact duplicates the lexicographically smallest witness
    survives (any witness type works; non-solutions compare by ``repr``).
    """
    pts = [p if isinstance(p, ParetoPoint) else ParetoPoint(int(p[0]), Fraction(p[1]), p[2]) for p in points]
    pts.sort(key=lambda p: (-p.overlap, p.travel_time, _witness_key(p.witness)))
    kept = []
    for p in pts:
        if kept and p.travel_time >= kept[-1].travel_time:
            continue
        kept.append(p)
    kept.reverse()
    return ParetoFront(tuple(kept))


def _solve_one(args) -> SolveResult:
    solve, request = args
    return solve(request)


def sweep(
    instance: Instance,
    solve: Callable[[SolveRequest], SolveResult] = solve_exact,
    workers: int = 1,
    time_limit: float | None = None,
) -> list[ParetoPoint]:
    """MinTravel optimum for every overlap floor from 0 to the maximum overlap.

    Raises :class:`FrontError` naming the first floor whose solve failed.
    Results come back in floor order even when solved in parallel.
    """
    top = solve(SolveRequest(instance, Objective.MAX_OVERLAP, time_limit=time_limit))
    if top.status is not Status.OPTIMAL:
        raise FrontError(None, top.status)
    o_max = top.solution.total_overlap
    reqs = [SolveRequest(instance, Objective.MIN_TRAVEL, eps, time_limit) for eps in range(o_max + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_solve_one, [(solve, r) for r in reqs]))
    else:
        results = [solve(r) for r in reqs]
    points = []
    for eps, res in enumerate(results):
        if res.status is not Status.OPTIMAL:
            raise FrontError(eps, res.status)
        points.append(ParetoPoint(eps, res.solution.travel_time, res.solution))
    return points


def enumerate_front(
    instance: Instance,
    solve: Callable[[SolveRequest], SolveResult] = solve_exact,
    workers: int = 1,
    time_limit: float | None = None,
) -> ParetoFront:
    """All Pareto-optimal (overlap, travel time) pairs with witness solutions."""
    return dominance_filter(sweep(instance, solve, workers, time_limit))
