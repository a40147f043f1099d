"""Node deployment, positions and distances."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional

from adhs_sim.rng import SplitMix64


class ConfigurationError(ValueError):
    pass


class Role(str, enum.Enum):
    BS = "BS"
    CH = "CH"
    NCH = "NCH"


@dataclass(frozen=True)
class Position:
    x: float
    y: float


@dataclass
class SensorNode:
    id: int
    pos: Position
    role: Role = Role.NCH
    parent: Optional[int] = None
    children: List[int] = field(default_factory=list)
    battery: float = math.inf


@dataclass(frozen=True)
class DeploymentConfig:
    n: int
    area: float
    seed: int
    comm_range: float

    def validate(self):
        if self.n < 2:
            raise ConfigurationError(f"n must be >= 2, got {self.n}")
        if not self.area > 0:
            raise ConfigurationError(f"area must be > 0, got {self.area}")
        if not self.comm_range > 0:
            raise ConfigurationError(f"comm_range must be > 0, got {self.comm_range}")


def deploy_uniform(cfg: DeploymentConfig) -> List[SensorNode]:
    """Place ``cfg.n`` nodes i.i.d. uniformly in the ``area x area`` square.

    Coordinates are drawn x then y per node from a SplitMix64 stream seeded
    with ``cfg.seed``, so the layout is reproducible across platforms.
    """
    cfg.validate()
    rng = SplitMix64(cfg.seed)
    nodes = []
    for i in range(cfg.n):
        x = rng.uniform(0.0, cfg.area)
        y = rng.uniform(0.0, cfg.area)
        nodes.append(SensorNode(i, Position(x, y)))
    return nodes


def deploy_grid(rows: int, cols: int, spacing: float) -> List[SensorNode]:
    if rows < 1 or cols < 1:
        raise ConfigurationError(f"grid needs rows, cols >= 1, got {rows}x{cols}")
    return [
        SensorNode(r * cols + c, Position(c * spacing, r * spacing))
        for r in range(rows)
        for c in range(cols)
    ]


def euclidean_distance(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)
