"""Shared builders and an independent reference for cluster formation."""

import random
from typing import Dict, List

from adhs_sim.adhs import AdhsParams
from adhs_sim.energy import EnergyParams
from adhs_sim.engine import Network, Simulation
from adhs_sim.field import Field, Rect, Region
from adhs_sim.hcc import BfsTree, assign_roles, cluster_formation, tree_discovery
from adhs_sim.topology import Position, SensorNode


def line_nodes(n, spacing=10.0):
    """Nodes 0..n-1 on the x axis; node 0 is the BS."""
    return [SensorNode(i, Position(i * spacing, 0.0)) for i in range(n)]


def network_from_positions(positions, k, comm_range):
    nodes = [SensorNode(i, Position(float(x), float(y))) for i, (x, y) in enumerate(positions)]
    tree = tree_discovery(nodes, 0, comm_range)
    h = cluster_formation(tree, k)
    return Network(assign_roles(h, nodes), h)


def constant_field(value):
    return Field((), value)


def star_network(n_children, d=10.0):
    """BS - CH - n leaves; every link has length d."""
    import math

    pos = [(0.0, 0.0), (d, 0.0)]
    for j in range(n_children):
        a = math.pi * (j + 1) / (n_children + 1) - math.pi / 2
        pos.append((d + d * math.cos(a), d * math.sin(a)))
    nodes = [SensorNode(i, Position(x, y)) for i, (x, y) in enumerate(pos)]
    tree = tree_discovery(nodes, 0, d * 1.001)
    # n_children + 2 nodes under one subtree: k = n+1 keeps it one cluster
    h = cluster_formation(tree, n_children + 1)
    return Network(assign_roles(h, nodes), h)


def run_sim(net, fld, t, lim, rounds, battery=float("inf"), energy=None, **kw):
    return Simulation(net, fld, AdhsParams(t, lim, **kw), energy or EnergyParams(), battery).run(rounds)


def random_tree(rng: random.Random, n_nodes: int) -> BfsTree:
    """Random rooted tree on ids 0..n_nodes-1 with root 0 and shuffled labels."""
    labels = list(range(1, n_nodes))
    rng.shuffle(labels)
    order = [0] + labels  # order[i] is the id of the i-th attached node
    parent = {}
    for i in range(1, n_nodes):
        parent[order[i]] = order[rng.randrange(i)]
    depth = {0: 0}
    for i in range(1, n_nodes):
        v = order[i]
        depth[v] = depth[parent[v]] + 1
    size = {v: 1 for v in range(n_nodes)}
    for v in sorted(parent, key=lambda x: -depth[x]):
        size[parent[v]] += size[v]
    return BfsTree(0, parent, depth, size)


# ---- reference cluster formation ------------------------------------------
# Written from the rule statement with plain set operations, no shared code.


def _subtree(par: Dict[int, int], v: int, alive) -> set:
    out = {v}
    grew = True
    while grew:
        grew = False
        for u, p in par.items():
            if u in alive and p in out and u not in out:
                out.add(u)
                grew = True
    return out


def _split(v, unclustered_kids, usub, k):
    total = 1 + sum(len(usub[c]) for c in unclustered_kids)
    if total < 2 * k:
        return [(v, {v}.union(*[usub[c] for c in unclustered_kids]))], False
    groups, acc, roots = [], set(), []
    for c in sorted(unclustered_kids):
        acc |= usub[c]
        roots.append(c)
        if len(acc) >= k:
            groups.append((min(roots), acc))
            acc, roots = set(), []
    groups.append((v, acc | {v}))
    return groups, True


def _reference_level(par: Dict[int, int], nodes: set, root: int, k: int):
    free = set(nodes)
    clusters, splits = [], []
    while True:
        usub = {v: _subtree(par, v, free) for v in free}
        kids = {v: [u for u in free if par.get(u) == v] for v in free}
        ready = [
            v for v in free
            if v != root and len(usub[v]) >= k and all(len(usub[c]) < k for c in kids[v])
        ]
        if not ready:
            break
        v = min(ready)
        groups, was_split = _split(v, kids[v], usub, k)
        clusters += groups
        if was_split:
            splits.append([g for _, g in groups])
        free -= usub[v]
    promoted = set()
    if root in free:
        usub = _subtree(par, root, free)
        if len(usub) >= k:
            kids = [u for u in free if par.get(u) == root]
            sub = {c: _subtree(par, c, free) for c in kids}
            groups, was_split = _split(root, kids, sub, k)
            clusters += groups
            if was_split:
                splits.append([g for _, g in groups])
        else:
            promoted = usub
    return clusters, promoted, splits


def reference_hierarchy(tree: BfsTree, k: int):
    """Set of (level, head, frozenset(members)), the uplink map, and split groups."""
    bs = tree.root
    tops = sorted(v for v, p in tree.parent.items() if p == bs)
    out = set()
    all_splits: List[List[set]] = []
    for top in tops:
        par = {v: p for v, p in tree.parent.items() if v != top}
        nodes = _subtree(tree.parent, top, set(tree.parent))
        par = {v: par[v] for v in nodes if v != top}
        levels = []
        while True:
            clusters, promoted, splits = _reference_level(par, nodes, top, k)
            all_splits += splits
            if not clusters:
                levels.append([(top, set(nodes))])
                break
            if len(clusters) == 1 and not promoted:
                levels.append(clusters)
                break
            levels.append(clusters)
            rep = {m: h for h, ms in clusters for m in ms}
            rep.update({m: m for m in promoted})
            nxt = set(rep.values())
            if len(nxt) == len(nodes):
                levels.append([(top, nxt)])
                break
            par = {v: rep[par[v]] for v in nxt if v != top}
            nodes = nxt
        for i, lev in enumerate(levels):
            for head, members in lev:
                out.add((len(levels) - i, head, frozenset(members)))
    uplink = {}
    for _, head, members in out:
        for m in members:
            if m != head:
                uplink[m] = head
    for v in tree.parent:
        uplink.setdefault(v, bs)
    return out, uplink, all_splits
