"""Instance generators: the two worked examples and a seeded random family."""

from __future__ import annotations

import random

from .core import Instance
from .onestation import ALL, OneStationSpec, build_one_station

MODES = ("free", "bounded", "equalTimes", "uniformAc")


def artificial4_spec() -> OneStationSpec:
    # lines 0, 1 carry 40 passengers each, lines 2, 3 carry 20; transfers
    # exist only between the two groups
    transfers = [
        (1, 3, 3, 5), (3, 1, 3, 10), (3, 0, 3, 5), (0, 2, 3, 10),
        (0, 3, 3, 10), (2, 1, 3, 10), (2, 0, 3, 5), (1, 2, 3, 5),
    ]
    return OneStationSpec(
        n=4,
        accel_times=(5, 5, 5, 5),
        brake_times=(6, 6, 6, 6),
        wait_bounds=((1, 4),) * 4,
        wait_weights=(40, 40, 20, 20),
        transfer_arcs=transfers,
    )


def gen_artificial4() -> Instance:
    """Four trains at one station, period 20, all 16 energy arcs."""
    return build_one_station(artificial4_spec(), 20)


def example_hp_spec() -> OneStationSpec:
    # (acceleration, braking) per line, top to bottom as drawn
    pairs = [(8, 12), (12, 8), (7, 6), (6, 7), (2, 5), (3, 2)]
    return OneStationSpec(
        n=6,
        accel_times=tuple(p[0] for p in pairs),
        brake_times=tuple(p[1] for p in pairs),
        wait_bounds=((5, 5),) * 6,
    )


def gen_example_hp() -> Instance:
    """Six trains, period 15, fixed waits of 5, all energy arcs.

    Several acceleration/braking pairs add up to 15 or more, so the instance
    carries phase-length violations by design.
    """
    return build_one_station(example_hp_spec(), 15)


def random_spec(
    seed: int,
    n: int,
    period: int,
    time_range: tuple[int, int] = (1, 3),
    wait_range: tuple[int, int] = (0, 3),
    mode: str = "bounded",
    transfer_prob: float = 0.0,
    energy_prob: float | None = None,
    max_weight: int = 5,
) -> OneStationSpec:
    """Seeded random one-station parameters.

    ``mode`` shapes the special-case structure: ``free`` makes every wait
    free, ``equalTimes`` sets acceleration equal to braking per line,
    ``uniformAc`` gives every line the same acceleration time. With
    ``energy_prob`` set, each energy arc is kept with that probability;
    otherwise all ``n * n`` arcs exist.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    lo_t, hi_t = time_range
    if n < 1 or lo_t < 1 or hi_t < lo_t:
        raise ValueError("need n >= 1 and 1 <= time_range[0] <= time_range[1]")
    if period <= 2 * hi_t:
        raise ValueError("period must exceed twice the largest phase time")
    lo_w, hi_w = wait_range
    if not 0 <= lo_w <= hi_w or lo_w > period - 1:
        raise ValueError("wait_range must satisfy 0 <= low <= high and low < period")

    rng = random.Random(seed)
    ac = [rng.randint(lo_t, hi_t) for _ in range(n)]
    br = [rng.randint(lo_t, hi_t) for _ in range(n)]
    if mode == "equalTimes":
        br = list(ac)
    elif mode == "uniformAc":
        ac = [ac[0]] * n
    waits = []
    for _ in range(n):
        lo = rng.randint(lo_w, min(hi_w, period - 1))
        if mode == "free":
            waits.append((lo, lo + period - 1))
        else:
            span = rng.randint(0, hi_w - lo_w)
            waits.append((lo, lo + min(span, period - 2)))
    weights = [rng.randint(0, max_weight) for _ in range(n)]
    transfers = []
    for k in range(n):
        for m in range(n):
            if k != m and rng.random() < transfer_prob:
                transfers.append((k, m, rng.randint(0, min(3, period - 1)), rng.randint(1, max_weight)))
    energy = ALL
    if energy_prob is not None:
        energy = tuple((k, m) for k in range(n) for m in range(n) if rng.random() < energy_prob)
    return OneStationSpec(n, tuple(ac), tuple(br), tuple(waits), tuple(weights), tuple(transfers), energy)


def gen_random(seed: int, n: int, period: int, time_range=(1, 3), wait_range=(0, 3), mode="bounded", **kw) -> Instance:
    """Seeded random one-station instance (see :func:`random_spec`)."""
    return build_one_station(random_spec(seed, n, period, time_range, wait_range, mode, **kw), period)
