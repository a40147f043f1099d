"""Trace CSV, summary/manifest JSON and hierarchy dumps."""

from __future__ import annotations

import csv
import json
import math
import os
from typing import Dict, Iterable

from adhs_sim.engine import Network, SimReport

TRACE_COLUMNS = [
    "round",
    "node_id",
    "role",
    "action",
    "e_receive",
    "e_process",
    "e_transmit",
    "battery",
    "variance",
    "period_c",
]


def fmt(x) -> str:
    """Shortest round-trip text for floats; empty for None."""
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def trace_rows(report: SimReport, net: Network) -> Iterable[list]:
    for rr in report.rounds:
        for v in sorted(rr.per_node):
            nr = rr.per_node[v]
            yield [
                rr.round,
                v,
                net.role(v).value,
                nr.action or "Transmit",
                fmt(nr.energy.receive),
                fmt(nr.energy.process),
                fmt(nr.energy.transmit),
                fmt(nr.battery),
                fmt(nr.variance),
                fmt(nr.period_c),
            ]


def write_trace(path: str, report: SimReport, net: Network):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for row in trace_rows(report, net):
            w.writerow(row)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def write_json(path: str, data: Dict):
    with open(path, "w") as fh:
        json.dump(_jsonable(data), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def hierarchy_dict(net: Network) -> Dict:
    d = net.hierarchy.to_dict()
    d["nodes"] = [
        {
            "id": nd.id,
            "x": nd.pos.x,
            "y": nd.pos.y,
            "role": nd.role.value,
            "parent": nd.parent,
            "children": nd.children,
        }
        for nd in net.nodes
    ]
    return d


def ensure_dir(path: str):
    os.makedirs(path, exist_ok=True)
