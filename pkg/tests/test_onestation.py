import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import cycle_max_by_enumeration, hamiltonian_orders, pair_ids, perfect_matchings
from pesp_energy.core import ActivityKind, decompose, evaluate
from pesp_energy.generators import artificial4_spec, example_hp_spec, gen_random, random_spec
from pesp_energy.onestation import (
    Method,
    OneStationSpec,
    PreconditionError,
    build_one_station,
    contiguous_cycle_overlap,
    dispatch,
    equal_times_blocks,
    extend_to_perfect,
    greedy_matching,
    hamiltonian_path_weight,
    large_period_threshold,
    max_weight_hamiltonian_cycle,
    max_weight_matching,
    merge_heuristic,
    merge_steps,
    solve_by_method,
    solve_equal_times_dp,
    solve_free_waiting,
    solve_large_period,
    solve_single_cycle_variant,
    solve_uniform_times,
    solve_with_matching,
)
from pesp_energy.solver import Objective, SolveRequest, brute_force


def weight(spec, pairs):
    return sum(min(spec.accel_times[k], spec.brake_times[m]) for k, m in pairs)


def is_single_cycle(inst, matching):
    comps = decompose(inst, matching)
    return len(comps) == 1 and comps[0].is_cycle


specs = st.builds(
    lambda n, seed: random_spec(seed, n, 41, (1, 20), (0, 5)),
    st.integers(1, 6), st.integers(0, 10_000),
)


# construction

def test_build_artificial_instance(art4):
    kinds = [a.kind for a in art4.activities]
    assert len(art4.events) == 8
    assert kinds.count(ActivityKind.WAIT) == 4
    assert kinds.count(ActivityKind.TRANSFER) == 8
    assert kinds.count(ActivityKind.ENERGY) == 16
    assert all(a.upper == a.lower + 19 for a in art4.activities if a.kind is ActivityKind.TRANSFER)
    assert sorted(a.weight for a in art4.activities if a.kind is ActivityKind.WAIT) == [20, 20, 40, 40]


def test_build_single_line():
    inst = build_one_station(OneStationSpec(1, (2,), (3,), ((0, 1),)), 10)
    assert len(inst.events) == 2
    assert [a.id for a in inst.activities] == ["wait.L01", "energy.L01.L01"]


def test_build_explicit_energy_arcs():
    arcs = ((0, 1), (1, 2), (2, 0), (0, 2))
    inst = build_one_station(OneStationSpec(3, (1, 2, 3), (3, 2, 1), ((0, 2),) * 3, energy_arcs=arcs), 10)
    assert len(inst.energy_arcs) == len(arcs)


def test_spec_rejects_bad_vectors():
    with pytest.raises(ValueError):
        OneStationSpec(2, (1,), (1, 1), ((0, 1),) * 2)
    with pytest.raises(ValueError):
        OneStationSpec(1, (0,), (1,), ((0, 1),))


# matchings

def test_greedy_example_hp():
    assert greedy_matching(example_hp_spec()).weight == 38


def test_greedy_uniform_times():
    spec = OneStationSpec(5, (3,) * 5, (3,) * 5, ((0, 1),) * 5)
    assert greedy_matching(spec).weight == 15


def test_greedy_two_trains():
    spec = OneStationSpec(2, (1, 10), (10, 1), ((0, 1),) * 2)
    rep = greedy_matching(spec)
    assert rep.weight == 11
    # ac 1 (line 1) feeds br 1 (line 2), ac 10 (line 2) feeds br 10 (line 1)
    assert rep.matching == pair_ids([(0, 1), (1, 0)])


@settings(max_examples=50, deadline=None)
@given(specs)
def test_greedy_beats_every_perfect_matching(spec):
    g = greedy_matching(spec).weight
    assert g == max(weight(spec, p) for p in perfect_matchings(spec.n))
    assert max_weight_matching(spec).weight == g


def test_max_weight_matching_empty_and_star():
    spec = OneStationSpec(3, (4, 2, 6), (1, 5, 3), ((0, 1),) * 3, energy_arcs=())
    assert max_weight_matching(spec) == max_weight_matching(build_one_station(spec, 20))
    assert max_weight_matching(spec).weight == 0
    star = OneStationSpec(3, (4, 2, 6), (1, 5, 3), ((0, 1),) * 3, energy_arcs=((0, 0), (0, 1), (0, 2)))
    rep = max_weight_matching(star)
    assert rep.weight == 4 and rep.matching == pair_ids([(0, 1)])


def test_extend_to_perfect():
    spec = random_spec(3, 3, 20, (1, 5), (0, 3))
    full = pair_ids([(0, 2), (1, 0), (2, 1)])
    assert extend_to_perfect(full, spec) == full
    ext = extend_to_perfect(frozenset(), spec)
    assert len(ext) == 3
    inst = build_one_station(spec, 20)
    evaluate(inst, ext, {e: 0 for e in inst.event} | {f"L0{k}.dep": 3 for k in (1, 2, 3)})
    path = pair_ids([(0, 1), (1, 2)])
    closed = extend_to_perfect(path, spec)
    assert closed == path | pair_ids([(2, 0)])
    assert is_single_cycle(inst, closed)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4), st.integers(6, 12), st.data())
def test_extension_never_loses_overlap(seed, n, T, data):
    spec = random_spec(seed, n, T, (1, 2), (0, 4))
    inst = build_one_station(spec, T)
    perm = data.draw(st.permutations(range(n)))
    keep = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    partial = pair_ids((k, perm[k]) for k in range(n) if keep[k])
    before = solve_with_matching(inst, partial).total_overlap
    after = solve_with_matching(inst, extend_to_perfect(partial, spec)).total_overlap
    assert after >= before


# free waiting

def test_free_waiting_reaches_matching_weight():
    for seed in range(30):
        inst = gen_random(seed, 1 + seed % 6, 15, (1, 7), (0, 5), "free")
        assert solve_free_waiting(inst).total_overlap == max_weight_matching(inst).weight


def test_free_waiting_single_train():
    inst = build_one_station(OneStationSpec(1, (3,), (3,), ((0, 9),)), 10)
    assert solve_free_waiting(inst).total_overlap == 3
    assert brute_force(SolveRequest(inst, Objective.MAX_OVERLAP)).value == 3


def test_free_waiting_without_energy_arcs():
    inst = build_one_station(OneStationSpec(2, (3, 2), (3, 1), ((0, 9),) * 2, energy_arcs=()), 10)
    assert solve_free_waiting(inst).total_overlap == 0


def test_free_waiting_precondition(art4):
    with pytest.raises(PreconditionError):
        solve_free_waiting(art4)


# Hamiltonian machinery

def test_hamiltonian_example_hp():
    spec = example_hp_spec()
    cyc = max_weight_hamiltonian_cycle(spec)
    assert cyc.weight == 36
    assert hamiltonian_path_weight(spec, cyc.matching) == 34


def test_hamiltonian_uniform_times():
    spec = OneStationSpec(4, (3,) * 4, (3,) * 4, ((0, 1),) * 4)
    assert max_weight_hamiltonian_cycle(spec).weight == 12


@pytest.mark.parametrize("seed", range(15))
def test_hamiltonian_matches_cyclic_order_enumeration(seed):
    n = 2 + seed % 5
    spec = random_spec(seed, n, 41, (1, 20), (0, 3))
    best = max(weight(spec, enumerate(phi)) for phi in hamiltonian_orders(n))
    rep = max_weight_hamiltonian_cycle(spec)
    assert rep.weight == best
    assert is_single_cycle(build_one_station(spec, 41), rep.matching)


def test_hamiltonian_size_limit():
    with pytest.raises(PreconditionError):
        max_weight_hamiltonian_cycle(random_spec(0, 9, 41, (1, 20), (0, 3)), limit=8)


def test_merge_keeps_single_greedy_cycle():
    # in both cases the greedy matching already closes a single cycle
    spec = OneStationSpec(1, (4,), (6,), ((0, 1),))
    assert len(merge_steps(spec)) == 1
    spec = OneStationSpec(3, (1, 2, 3), (2, 3, 1), ((0, 1),) * 3)
    steps = merge_steps(spec)
    assert len(steps) == 1
    assert merge_heuristic(spec).matching == greedy_matching(spec).matching


def test_merge_example_hp():
    spec = example_hp_spec()
    merged = merge_heuristic(spec)
    path = hamiltonian_path_weight(spec, merged.matching)
    assert path >= 38 - min(12, 12)
    assert path <= 34


@settings(max_examples=60, deadline=None)
@given(specs)
def test_merge_properties(spec):
    inst = build_one_station(spec, 41)
    merged = merge_heuristic(spec)
    cyc = max_weight_hamiltonian_cycle(spec)
    greedy = greedy_matching(spec).weight
    assert is_single_cycle(inst, merged.matching)
    assert greedy - hamiltonian_path_weight(spec, merged.matching) <= min(max(spec.accel_times), max(spec.brake_times))
    assert merged.weight <= cyc.weight <= greedy
    # each swap merges exactly two cycles
    counts = [len(decompose(inst, pair_ids(enumerate(phi)))) for phi in merge_steps(spec)]
    assert counts == list(range(counts[0], 0, -1))


# single cycle variant

def test_single_cycle_artificial(art4):
    assert solve_single_cycle_variant(art4).total_overlap == 20


def test_single_cycle_uniform():
    inst = build_one_station(OneStationSpec(3, (2,) * 3, (2,) * 3, ((1, 4),) * 3), 9)
    # L = 9 hits the period
    assert solve_single_cycle_variant(inst).total_overlap == 6


@pytest.mark.parametrize("seed", range(12))
def test_single_cycle_matches_restricted_enumeration(seed):
    rng = random.Random(seed)
    T = rng.randint(5, 10)
    inst = gen_random(seed, 3, T, (1, (T - 1) // 2), (0, 3))
    best = 0
    for phi in hamiltonian_orders(3):
        m = pair_ids(enumerate(phi))
        (comp,) = decompose(inst, m)
        best = max(best, cycle_max_by_enumeration(inst, comp.arcs))
    sol = solve_single_cycle_variant(inst)
    assert sol.total_overlap == best
    assert is_single_cycle(inst, sol.matching)


# large period and uniform times

def test_large_period_artificial():
    spec = artificial4_spec()
    inst = build_one_station(spec, 60)
    assert large_period_threshold(inst) == 60
    assert solve_large_period(inst).total_overlap == 15
    with pytest.raises(PreconditionError):
        solve_large_period(build_one_station(spec, 59))


def test_large_period_single_train():
    inst = build_one_station(OneStationSpec(1, (3,), (4,), ((1, 2),)), 1000)
    assert solve_large_period(inst).total_overlap == 0


def test_uniform_artificial(art4):
    assert solve_uniform_times(art4).total_overlap == 20


@pytest.mark.parametrize("seed", range(10))
def test_uniform_two_trains_against_oracle(seed):
    T = 5 + seed % 6
    inst = gen_random(seed, 2, T, (1, 2), (0, 3), "uniformAc")
    assert solve_uniform_times(inst).total_overlap == brute_force(SolveRequest(inst, Objective.MAX_OVERLAP)).value


def test_uniform_precondition():
    inst = build_one_station(OneStationSpec(2, (1, 2), (2, 3), ((0, 1),) * 2), 10)
    with pytest.raises(PreconditionError):
        solve_uniform_times(inst)


# equal times

def test_contiguous_cycle_examples():
    assert contiguous_cycle_overlap(0, 0, [3], [(0, 0)], 10) == 0
    assert contiguous_cycle_overlap(0, 2, [2, 3, 5], [(0, 0)] * 3, 11) == 7
    assert contiguous_cycle_overlap(0, 0, [3], [(7, 7)], 10) == 3
    with pytest.raises(ValueError):
        contiguous_cycle_overlap(0, 1, [3, 2], [(0, 0)] * 2, 10)


def test_contiguous_cycle_by_enumeration():
    spec = OneStationSpec(3, (2, 3, 5), (2, 3, 5), ((0, 0),) * 3)
    inst = build_one_station(spec, 11)
    # departure i feeds arrival i - 1, departure 0 closes at arrival 2
    (comp,) = decompose(inst, pair_ids([(1, 0), (2, 1), (0, 2)]))
    assert cycle_max_by_enumeration(inst, comp.arcs) == 7


def test_dp_single_train():
    inst = build_one_station(OneStationSpec(1, (3,), (3,), ((2, 4),)), 8)
    assert solve_equal_times_dp(inst).total_overlap == contiguous_cycle_overlap(0, 0, [3], [(2, 4)], 8)


@pytest.mark.parametrize("seed", range(10))
def test_dp_agrees_with_uniform_when_times_equal(seed):
    rng = random.Random(seed)
    n, t, T = rng.randint(1, 6), rng.randint(1, 4), rng.randint(9, 20)
    waits = tuple((lo, lo + rng.randint(0, 3)) for lo in (rng.randint(0, 4) for _ in range(n)))
    inst = build_one_station(OneStationSpec(n, (t,) * n, (t,) * n, waits), T)
    assert solve_equal_times_dp(inst).total_overlap == solve_uniform_times(inst).total_overlap


def test_dp_blocks_cover_sorted_trains():
    value, blocks = equal_times_blocks([1, 2, 2, 4, 5], [0, 1, 0, 2, 1], [1, 3, 2, 2, 4], 11)
    assert blocks[0][0] == 0 and blocks[-1][1] == 4
    assert all(b[0] == a[1] + 1 for a, b in zip(blocks, blocks[1:]))
    assert value == sum(contiguous_cycle_overlap(s, l, [1, 2, 2, 4, 5], list(zip([0, 1, 0, 2, 1], [1, 3, 2, 2, 4])), 11)
                        for s, l in blocks)


def test_dp_precondition(art4):
    with pytest.raises(PreconditionError):
        solve_equal_times_dp(art4)


# dispatch

def test_dispatch_artificial(art4):
    res = dispatch(art4)
    assert (res.method, res.solution.total_overlap, res.optimal) == ("uniform", 20, True)


def test_dispatch_free_waits():
    res = dispatch(gen_random(3, 4, 12, (1, 5), (0, 3), "free"))
    assert res.method == "free" and res.optimal


def test_dispatch_routes():
    dp = dispatch(gen_random(2, 4, 12, (2, 5), (0, 3), "equalTimes"))
    assert dp.method in ("dp", "uniform")
    example = dispatch(build_one_station(example_hp_spec(), 15))
    assert example.method == "exact" and example.solution.total_overlap == 35


def test_dispatch_heuristic_bracket():
    spec = OneStationSpec(8, (3, 9, 4, 7, 2, 8, 5, 6), (6, 2, 9, 3, 8, 4, 7, 5), ((1, 3),) * 8)
    inst = build_one_station(spec, 40)
    res = dispatch(inst)
    assert res.method == Method.MERGE.value
    sol = res.solution
    assert res.upper == max_weight_matching(inst).weight
    assert hamiltonian_path_weight(inst, sol.matching) <= res.lower <= sol.total_overlap <= res.upper
    assert is_single_cycle(inst, sol.matching)


def test_dispatch_restricted_beyond_limits():
    spec = OneStationSpec(7, (3,) * 7, (2, 4, 3, 5, 6, 1, 2), ((1, 3),) * 7,
                          energy_arcs=tuple((k, (k + 1) % 7) for k in range(7)))
    with pytest.raises(PreconditionError):
        dispatch(build_one_station(spec, 30))


@pytest.mark.parametrize("method", [m.value for m in Method])
def test_every_method_respects_matching_bound(method):
    if method == "large-period":
        inst, expected = build_one_station(OneStationSpec(3, (2,) * 3, (2,) * 3, ((1, 1),) * 3), 15), 4
    else:
        inst, expected = build_one_station(OneStationSpec(3, (2,) * 3, (2,) * 3, ((0, 9),) * 3), 10), 6
    res = solve_by_method(inst, method)
    assert res.lower <= res.solution.total_overlap <= res.upper <= max_weight_matching(inst).weight
    assert res.solution.total_overlap == expected


def test_named_method_preconditions(art4):
    with pytest.raises(PreconditionError):
        solve_by_method(art4, "dp")
    with pytest.raises(ValueError):
        solve_by_method(art4, "nonsense")


def test_permutation_helper_sanity():
    assert len(list(hamiltonian_orders(4))) == 6
    assert len(list(perfect_matchings(3))) == len(list(itertools.permutations(range(3))))
