"""JSON instance and solution files.

Weights are written as decimal strings when the fraction terminates and as
``"p/q"`` otherwise, so reading and writing a canonical file is lossless.
"""

from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from .core import Activity, ActivityKind, Event, EventKind, Instance, Solution


class InstanceFormatError(ValueError):
    """The file is not a well-formed instance."""


def parse_weight(text) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise InstanceFormatError(f"weight must be a decimal string, got {text!r}")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceFormatError(f"bad weight {text!r}") from exc


def format_weight(w: Fraction) -> str:
    w = Fraction(w)
    if w.denominator == 1:
        return str(w.numerator)
    d = w.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return f"{w.numerator}/{w.denominator}"
    text = format(Decimal(w.numerator) / Decimal(w.denominator), "f")
    return text.rstrip("0").rstrip(".") if "." in text else text


def _int(obj, key, where):
    v = obj.get(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise InstanceFormatError(f"{where}: field {key!r} must be an integer")
    return v


def instance_from_dict(data) -> Instance:
    if not isinstance(data, dict):
        raise InstanceFormatError("top level must be an object")
    for key in ("period", "events", "activities"):
        if key not in data:
            raise InstanceFormatError(f"missing field {key!r}")
    period = _int(data, "period", "instance")
    for key in ("events", "activities"):
        if not isinstance(data[key], list) or not all(isinstance(r, dict) for r in data[key]):
            raise InstanceFormatError(f"field {key!r} must be an array of objects")
    events = []
    for raw in data["events"]:
        where = f"event {raw.get('id')!r}"
        try:
            kind = EventKind(raw["kind"])
            events.append(
                Event(
                    id=str(raw["id"]),
                    kind=kind,
                    line=str(raw["line"]),
                    station=str(raw["station"]),
                    brake_time=_int(raw, "brake_time", where) if "brake_time" in raw else None,
                    accel_time=_int(raw, "accel_time", where) if "accel_time" in raw else None,
                )
            )
        except (KeyError, ValueError, AttributeError) as exc:
            if isinstance(exc, InstanceFormatError):
                raise
            raise InstanceFormatError(f"{where}: {exc}") from exc
    activities = []
    for raw in data["activities"]:
        where = f"activity {raw.get('id')!r}"
        try:
            activities.append(
                Activity(
                    id=str(raw["id"]),
                    kind=ActivityKind(raw["kind"]),
                    tail=str(raw["tail"]),
                    head=str(raw["head"]),
                    lower=_int(raw, "lower", where),
                    upper=_int(raw, "upper", where),
                    weight=parse_weight(raw.get("weight", "0")),
                )
            )
        except (KeyError, ValueError, AttributeError) as exc:
            if isinstance(exc, InstanceFormatError):
                raise
            raise InstanceFormatError(f"{where}: {exc}") from exc
    return Instance(period, tuple(events), tuple(activities))


def instance_to_dict(instance: Instance) -> dict:
    events = []
    for e in instance.events:
        d = {"id": e.id, "kind": e.kind.value, "line": e.line, "station": e.station}
        if e.brake_time is not None:
            d["brake_time"] = e.brake_time
        if e.accel_time is not None:
            d["accel_time"] = e.accel_time
        events.append(d)
    activities = [
        {
            "id": a.id,
            "kind": a.kind.value,
            "tail": a.tail,
            "head": a.head,
            "lower": a.lower,
            "upper": a.upper,
            "weight": format_weight(a.weight),
        }
        for a in instance.activities
    ]
    return {"period": instance.period, "events": events, "activities": activities}


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def loads_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    return instance_from_dict(data)


def read_instance(path) -> Instance:
    return loads_instance(Path(path).read_text(encoding="utf-8"))


def write_instance(instance: Instance, path) -> None:
    Path(path).write_text(dumps_instance(instance), encoding="utf-8", newline="\n")


def solution_to_dict(solution: Solution) -> dict:
    return {
        "total_overlap": solution.total_overlap,
        "travel_time": format_weight(solution.travel_time),
        "matching": sorted(solution.matching),
        "timetable": dict(sorted(solution.timetable.items())),
        "tensions": dict(sorted(solution.tensions.items())),
        "overlaps": dict(sorted(solution.overlaps.items())),
    }
