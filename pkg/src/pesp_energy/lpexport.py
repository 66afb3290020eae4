"""Mixed-integer model in CPLEX LP format.

Variables: event times ``pi_<event>``, modulo parameters ``p_<act>``,
tensions ``x_<act>`` and, per energy arc, the overlap ``o_<act>`` and the
selection flag ``alpha_<act>``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .core import Instance


@dataclass(frozen=True)
class ModelExport:
    text: str
    gamma: int


def _name(prefix: str, ident: str) -> str:
    return prefix + re.sub(r"[^A-Za-z0-9_.]", "_", ident)


def _coef(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return repr(float(c))


def _wrap(terms: list[str], indent: str = "   ") -> list[str]:
    if not terms:
        return [indent + "0"]
    lines, cur = [], indent
    for t in terms:
        if len(cur) + len(t) > 200:
            lines.append(cur.rstrip())
            cur = indent
        cur += t + " "
    lines.append(cur.rstrip())
    return lines


def _sum(coefs_vars: list[tuple[Fraction | int, str]]) -> list[str]:
    terms = []
    for c, v in coefs_vars:
        c = Fraction(c)
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = v if mag == 1 else f"{_coef(mag)} {v}"
        terms.append(f"{sign} {body}")
    if terms and terms[0].startswith("+ "):
        terms[0] = terms[0][2:]
    return terms


def export_lp(instance: Instance, overlap_floor: int = 0) -> ModelExport:
    """Write the travel-time model with an overlap floor as LP text.

    ``gamma`` is the big-M that switches off the falling edge of the overlap
    function on unselected energy arcs.
    """
    T = instance.period
    events = sorted(instance.event)
    acts = sorted(instance.activities, key=lambda a: a.id)
    energy = sorted(instance.energy_arcs, key=lambda a: a.id)
    gamma = max((T - (instance.t_max(a) + instance.t_min(a)) for a in energy), default=0)
    gamma = max(gamma, 0)

    pi = {e: _name("pi_", e) for e in events}
    x = {a.id: _name("x_", a.id) for a in acts}
    p = {a.id: _name("p_", a.id) for a in acts}
    o = {a.id: _name("o_", a.id) for a in energy}
    al = {a.id: _name("alpha_", a.id) for a in energy}

    out = ["\\ periodic timetable: weighted travel time with brake-traction overlap floor"]
    out.append(f"\\ period {T}, overlap floor {overlap_floor}, gamma {gamma}")
    out.append("Minimize")
    out.append(" travel:")
    out.extend(_wrap(_sum([(a.weight, x[a.id]) for a in acts])))
    out.append("Subject To")
    for a in acts:
        terms = _sum([(1, x[a.id]), (-1, pi[a.head]), (1, pi[a.tail]), (-T, p[a.id])])
        out.append(f" mod_{x[a.id][2:]}: " + " ".join(terms) + " = 0")
    for a in energy:
        k = o[a.id][2:]
        tmin, tmax = instance.t_min(a), instance.t_max(a)
        out.append(f" ox_{k}: {o[a.id]} - {x[a.id]} <= 0")
        out.append(f" oa_{k}: {o[a.id]} - {tmin} {al[a.id]} <= 0")
        out.append(f" of_{k}: {o[a.id]} + {x[a.id]} + {gamma} {al[a.id]} <= {tmax + tmin + gamma}")
    for side, key in (("arr", "head"), ("dep", "tail")):
        groups: dict[str, list[str]] = {}
        for a in energy:
            groups.setdefault(getattr(a, key), []).append(al[a.id])
        for ev in sorted(groups):
            terms = _sum([(1, v) for v in groups[ev]])
            lines = _wrap(terms)
            lines[0] = f" match_{side}_{pi[ev][3:]}: " + lines[0].lstrip()
            lines[-1] += " <= 1"
            out.extend(lines)
    if energy:
        lines = _wrap(_sum([(1, o[a.id]) for a in energy]))
        lines[0] = " floor: " + lines[0].lstrip()
        lines[-1] += f" >= {overlap_floor}"
        out.extend(lines)
    out.append("Bounds")
    for e in events:
        out.append(f" 0 <= {pi[e]} <= {T - 1}")
    for a in acts:
        out.append(f" {a.lower} <= {x[a.id]} <= {a.upper}")
    for a in acts:
        out.append(f" {p[a.id]} free")
    out.append("Generals")
    out.extend(_wrap([pi[e] for e in events] + [p[a.id] for a in acts], " "))
    if energy:
        out.append("Binaries")
        out.extend(_wrap([al[a.id] for a in energy], " "))
    out.append("End")
    return ModelExport("\n".join(out) + "\n", gamma)
