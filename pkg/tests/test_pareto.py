import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pesp_energy.generators import gen_random
from pesp_energy.onestation import OneStationSpec, build_one_station
from pesp_energy.pareto import FrontError, ParetoPoint, dominance_filter, enumerate_front, sweep
from pesp_energy.solver import Objective, SolveRequest, brute_force_front, enumerate_outcomes, solve_exact

# optimal travel time per overlap floor 0..20 of the 4-train instance
ART4_FLOORS = [500, 620, 620, 620, 630, 640, 640, 650, 650, 660, 660,
               670, 680, 690, 700, 710, 720, 850, 900, 960, 1010]


def pt(o, t, tag=0):
    return (o, t, tag)


def test_filter_equal_cost_more_overlap_wins():
    front = dominance_filter([pt(0, 500), pt(1, 500)])
    assert front.pairs() == [(1, 500)]


def test_filter_keeps_strict_chain():
    chain = [pt(0, 500), pt(3, 600), pt(5, 640)]
    assert dominance_filter(chain).pairs() == [(0, 500), (3, 600), (5, 640)]


def test_filter_duplicates_keep_smallest_witness():
    from pesp_energy.core import Solution

    def sol(t):
        return Solution(frozenset(), {"a": t}, {}, {}, Fraction(7), 2)

    front = dominance_filter([ParetoPoint(2, Fraction(7), sol(4)), ParetoPoint(2, Fraction(7), sol(1))])
    assert len(front.points) == 1 and front.points[0].witness.timetable == {"a": 1}


@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 30)), max_size=12), st.randoms())
def test_filter_is_order_independent(raw, rnd):
    pts = [pt(o, t) for o, t in raw]
    shuffled = list(pts)
    rnd.shuffle(shuffled)
    a, b = dominance_filter(pts).pairs(), dominance_filter(shuffled).pairs()
    assert a == b
    overlaps = [o for o, _ in a]
    travels = [t for _, t in a]
    assert overlaps == sorted(set(overlaps))
    assert all(x < y for x, y in zip(travels, travels[1:]))
    # nothing kept is dominated, everything dropped is
    for o, t in raw:
        dominated = any(o2 >= o and t2 <= t and (o2, t2) != (o, t) for o2, t2 in a)
        assert dominated or (o, t) in a


def test_artificial_sweep(art4_sweep):
    points, _ = art4_sweep
    assert [p.overlap for p in points] == list(range(21))
    assert [p.travel_time for p in points] == ART4_FLOORS
    travels = [p.travel_time for p in points]
    assert all(a <= b for a, b in zip(travels, travels[1:]))
    front = dominance_filter(points).pairs()
    assert all(a[1] < b[1] for a, b in zip(front, front[1:]))
    assert front[0] == (0, 500) and front[-1] == (20, 1010)
    assert (16, 720) in front


def test_artificial_front_by_exhaustive_enumeration(art4):
    # every timetable with one event fixed at 0: 20^7 candidates
    _, travel, best, _, scale = enumerate_outcomes(art4, max_events=8, max_period=20)
    floors = [Fraction(int(travel[best >= eps].min()), scale) for eps in range(int(best.max()) + 1)]
    assert floors == ART4_FLOORS
    del travel, best


def test_front_ends_match_scalar_solves():
    inst = gen_random(11, 3, 9, (1, 3), (0, 2), transfer_prob=0.6)
    front = enumerate_front(inst)
    top = solve_exact(SolveRequest(inst, Objective.MAX_OVERLAP)).value
    low = solve_exact(SolveRequest(inst, Objective.MIN_TRAVEL)).value
    assert front.points[-1].overlap == top
    assert front.points[0].travel_time == low


def test_front_without_energy_arcs():
    spec = OneStationSpec(2, (2, 3), (3, 2), ((1, 2), (0, 3)), (2, 5), ((0, 1, 2, 3),), energy_arcs=())
    inst = build_one_station(spec, 9)
    front = enumerate_front(inst)
    assert front.pairs() == [(0, solve_exact(SolveRequest(inst, Objective.MIN_TRAVEL)).value)]


@pytest.mark.parametrize("seed", range(12))
def test_two_train_front_matches_enumeration(seed):
    rng = random.Random(seed)
    T = rng.randint(5, 10)
    inst = gen_random(seed, 2, T, (1, (T - 1) // 2), (0, 3), ("free", "bounded", "equalTimes", "uniformAc")[seed % 4],
                      transfer_prob=0.7, energy_prob=rng.choice([None, 0.7]))
    assert enumerate_front(inst).pairs() == brute_force_front(inst)


def test_front_is_deterministic():
    inst = gen_random(5, 3, 10, (1, 4), (0, 3), transfer_prob=0.5)
    a, b = enumerate_front(inst), enumerate_front(inst)
    assert a == b


def test_parallel_sweep_matches_serial():
    inst = gen_random(7, 3, 10, (1, 4), (0, 3), transfer_prob=0.5)
    assert sweep(inst, workers=2) == sweep(inst)


def test_failed_subsolve_raises(art4):
    with pytest.raises(FrontError):
        sweep(art4, time_limit=1e-6)


def test_witnesses_realize_their_points(art4_sweep, art4):
    from pesp_energy.core import evaluate

    points, _ = art4_sweep
    for p in points:
        w = evaluate(art4, p.witness.matching, p.witness.timetable)
        assert w.travel_time == p.travel_time and w.total_overlap >= p.overlap
    assert np.all(np.diff([p.travel_time for p in points]) >= 0)
