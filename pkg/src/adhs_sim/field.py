"""Ground-truth field sampled by the sensors, and window statistics."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

from adhs_sim.topology import Position


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def contains(self, pos: Position) -> bool:
        return self.x0 <= pos.x <= self.x1 and self.y0 <= pos.y <= self.y1


@dataclass(frozen=True)
class Circle:
    cx: float
    cy: float
    r: float

    def contains(self, pos: Position) -> bool:
        return (pos.x - self.cx) ** 2 + (pos.y - self.cy) ** 2 <= self.r**2


Shape = Union[Rect, Circle]


@dataclass(frozen=True)
class Region:
    """A shape whose value follows a step timeline of ``(round, value)`` pairs.

    Before the first step, and outside ``[start, stop)``, the region is inactive
    and lookups fall through to the next region.
    """

    shape: Shape
    timeline: Tuple[Tuple[int, float], ...]
    start: int = 0
    stop: Optional[int] = None

    def __post_init__(self):
        steps = tuple(sorted((int(r), float(v)) for r, v in self.timeline))
        if not steps:
            raise ValueError("region timeline needs at least one step")
        object.__setattr__(self, "timeline", steps)
        object.__setattr__(self, "_rounds", [r for r, _ in steps])

    def value_at(self, pos: Position, rnd: int) -> Optional[float]:
        if rnd < self.start or (self.stop is not None and rnd >= self.stop):
            return None
        if not self.shape.contains(pos):
            return None
        i = bisect.bisect_right(self._rounds, rnd) - 1
        if i < 0:
            return None
        return self.timeline[i][1]


@dataclass(frozen=True)
class Field:
    regions: Tuple[Region, ...] = ()
    default_value: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))


@dataclass(frozen=True)
class Reading:
    source: int
    round: int
    value: float


def sample_field(fld: Field, pos: Position, rnd: int) -> float:
    """Value at ``pos`` in round ``rnd``; the first active matching region wins."""
    for region in fld.regions:
        v = region.value_at(pos, rnd)
        if v is not None:
            return v
    return fld.default_value


def variance(values: Sequence[float], kind: str = "population") -> float:
    """Population (default) or sample variance of a nonempty list.

    Sample variance of a single value is taken as 0.
    """
    n = len(values)
    if n == 0:
        raise ValueError("variance of an empty list")
    mean = sum(values) / n
    ss = sum((v - mean) ** 2 for v in values)
    if kind == "population":
        return ss / n
    if kind == "sample":
        return ss / (n - 1) if n > 1 else 0.0
    raise ValueError(f"unknown variance kind {kind!r}")


def region_from_dict(d: dict) -> Region:
    """Build a Region from its config-file form.

    ``{"shape": "rect", "x0":.., "y0":.., "x1":.., "y1":.., "timeline": [[0, 10]]}``
    or ``{"shape": "circle", "cx":.., "cy":.., "r":.., ...}``; optional ``start``/``stop``.
    A bare ``value`` is shorthand for ``timeline: [[0, value]]``.
    """
    kind = d.get("shape")
    if kind == "rect":
        shape: Shape = Rect(float(d["x0"]), float(d["y0"]), float(d["x1"]), float(d["y1"]))
    elif kind == "circle":
        shape = Circle(float(d["cx"]), float(d["cy"]), float(d["r"]))
    else:
        raise ValueError(f"unknown region shape {kind!r}")
    if "timeline" in d:
        timeline = [tuple(step) for step in d["timeline"]]
    elif "value" in d:
        timeline = [(0, d["value"])]
    else:
        raise ValueError("region needs 'timeline' or 'value'")
    return Region(shape, tuple(timeline), int(d.get("start", 0)), d.get("stop"))


def region_to_dict(region: Region) -> dict:
    s = region.shape
    if isinstance(s, Rect):
        d = {"shape": "rect", "x0": s.x0, "y0": s.y0, "x1": s.x1, "y1": s.y1}
    else:
        d = {"shape": "circle", "cx": s.cx, "cy": s.cy, "r": s.r}
    d["timeline"] = [[r, v] for r, v in region.timeline]
    if region.start:
        d["start"] = region.start
    if region.stop is not None:
        d["stop"] = region.stop
    return d


def field_from_dicts(regions: List[dict], default_value: float = 0.0) -> Field:
    return Field(tuple(region_from_dict(r) for r in regions), float(default_value))
