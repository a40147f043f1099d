"""Scenario presets and construction of (network, field) from a resolved config."""

from __future__ import annotations

import math
from typing import List, Tuple

from adhs_sim.engine import Network
from adhs_sim.field import Field, Rect, Region, field_from_dicts
from adhs_sim.hcc import assign_roles, cluster_formation, tree_discovery
from adhs_sim.rng import SplitMix64
from adhs_sim.topology import DeploymentConfig, Position, SensorNode, deploy_grid, deploy_uniform

FIG3_CENTER = (50.0, 50.0)
FIG3_LINK = 10.0
FIG3_STRADDLER = 2  # index (0-based) among the four mid-level CHs


def fig3_positions() -> List[Tuple[float, float]]:
    """BS, top CH, four mid CHs, then three leaves per mid CH (ids in that order).

    Every link is exactly FIG3_LINK long.  The BS and the four mid CHs sit on a
    regular pentagon around the top CH; each mid CH's leaves fan outward at
    -36, 0 and +36 degrees.  With comm_range 10.5 the BFS from the BS then
    reproduces the 3-level tree.
    """
    cx, cy = FIG3_CENTER
    r = FIG3_LINK
    pts = []
    angles = [-90.0 + 72.0 * j for j in range(5)]
    pts.append((cx + r * math.cos(math.radians(angles[0])), cy + r * math.sin(math.radians(angles[0]))))
    pts.append((cx, cy))
    mids = []
    for a in angles[1:]:
        mids.append((cx + r * math.cos(math.radians(a)), cy + r * math.sin(math.radians(a)), a))
    pts.extend((x, y) for x, y, _ in mids)
    for x, y, a in mids:
        for off in (-36.0, 0.0, 36.0):
            b = math.radians(a + off)
            pts.append((x + r * math.cos(b), y + r * math.sin(b)))
    return pts


def _fig3_regions() -> List[dict]:
    pts = fig3_positions()
    first_leaf = 6 + 3 * FIG3_STRADDLER
    ax, ay = pts[first_leaf]
    cx_, cy_ = pts[first_leaf + 2]
    return [
        {"shape": "circle", "cx": ax, "cy": ay, "r": 2.0, "timeline": [[0, 10.0]]},  # A
        {"shape": "circle", "cx": cx_, "cy": cy_, "r": 2.0, "timeline": [[0, 30.0]]},  # C
        {"shape": "rect", "x0": 0.0, "y0": 0.0, "x1": 100.0, "y1": 100.0, "timeline": [[0, 20.0]]},  # B
    ]


def kruger_herd(area: float = 110.0, size: float = 30.0, dwell: int = 15, gap: int = 15, hops: int = 16):
    """A square herd that shows up at successive spots, with empty gaps between visits."""
    regions = []
    t = 10
    for i in range(hops):
        x0 = (i * 37.0) % (area - size)
        y0 = (i * 23.0) % (area - size)
        regions.append(
            {
                "shape": "rect",
                "x0": x0,
                "y0": y0,
                "x1": x0 + size,
                "y1": y0 + size,
                "timeline": [[0, 1.0]],
                "start": t,
                "stop": t + dwell,
            }
        )
        t += dwell + gap
    return regions


PRESETS = {
    "fig3": {
        "rounds": 8,
        "deployment": {"kind": "explicit", "positions": [list(p) for p in fig3_positions()]},
        "hierarchy": {"k": 4, "comm_range": 10.5},
        "adhs": {"t_threshold": 15.0, "l_limit": 2},
        "field": {"default_value": 0.0, "regions": _fig3_regions()},
    },
    "kruger": {
        "rounds": 500,
        "battery_j": 0.1,
        "deployment": {"kind": "grid", "rows": 12, "cols": 12, "spacing": 10.0},
        "hierarchy": {"k": 4, "comm_range": 10.0},
        "adhs": {"t_threshold": 0.05, "l_limit": 8},
        "energy": {"alpha": 0.5, "bits_per_message": 2000.0},
        "field": {"default_value": 0.0, "regions": kruger_herd()},
    },
    "uniform_random": {
        "rounds": 200,
        "deployment": {"kind": "uniform", "n": 60, "area": 100.0, "bs_position": [50.0, 50.0]},
        "hierarchy": {"k": 4, "comm_range": 30.0},
        "adhs": {"t_threshold": 15.0, "l_limit": 8},
        "field": {"default_value": 20.0, "random_regions": 3},
    },
}


def deploy(cfg) -> List[SensorNode]:
    d = cfg.deployment
    if d.kind == "uniform":
        nodes = deploy_uniform(DeploymentConfig(d.n, d.area, cfg.seed, cfg.hierarchy.comm_range))
    elif d.kind == "grid":
        nodes = deploy_grid(d.rows, d.cols, d.spacing)
    else:
        nodes = [SensorNode(i, Position(float(x), float(y))) for i, (x, y) in enumerate(d.positions)]
    if d.bs_position is not None:
        nodes[0].pos = Position(float(d.bs_position[0]), float(d.bs_position[1]))
    return nodes


def random_regions(count: int, area: float, values, seed: int) -> Tuple[Region, ...]:
    rng = SplitMix64(seed).split()
    out = []
    for _ in range(count):
        x0, x1 = sorted((rng.uniform(0, area), rng.uniform(0, area)))
        y0, y1 = sorted((rng.uniform(0, area), rng.uniform(0, area)))
        value = values[rng.randint(0, len(values) - 1)]
        out.append(Region(Rect(x0, y0, x1, y1), ((0, float(value)),)))
    return tuple(out)


def build_field(cfg) -> Field:
    f = cfg.field
    base = field_from_dicts(list(f.regions), f.default_value)
    extra = ()
    if f.random_regions:
        extent = cfg.deployment.area if cfg.deployment.kind == "uniform" else 100.0
        extra = random_regions(f.random_regions, extent, f.random_values, cfg.seed)
    return Field(base.regions + extra, base.default_value)


def build_network(cfg) -> Network:
    nodes = deploy(cfg)
    tree = tree_discovery(nodes, 0, cfg.hierarchy.comm_range)
    h = cluster_formation(tree, cfg.hierarchy.k)
    return Network(assign_roles(h, nodes), h)


def build_scenario(cfg):
    return build_network(cfg), build_field(cfg)
