"""Hierarchical control clustering: BFS tree discovery, then size-driven cluster formation.

Formation is a bottom-up pass over the BFS tree.  Once the not-yet-clustered
part of a node's subtree holds ``k`` or more nodes, that node clusters it: one
cluster if it has fewer than ``2k`` nodes, otherwise several (see
``_clusters_at``).  The resulting cluster heads, together with whatever was
left unclustered near the top, form a contracted tree on which the same pass
runs again, level after level, until a single cluster remains under each
child of the base station.
"""

from __future__ import annotations

import dataclasses
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from adhs_sim.topology import Role, SensorNode, euclidean_distance


class ConnectivityError(ValueError):
    pass


@dataclass(frozen=True)
class BfsTree:
    root: int
    parent: Dict[int, int]
    depth: Dict[int, int]
    subtree_size: Dict[int, int]

    def children(self) -> Dict[int, List[int]]:
        kids: Dict[int, List[int]] = {v: [] for v in self.depth}
        for v, p in self.parent.items():
            kids[p].append(v)
        for v in kids:
            kids[v].sort()
        return kids


@dataclass(frozen=True)
class Cluster:
    id: int
    head: int
    members: Tuple[int, ...]
    level: int


@dataclass(frozen=True)
class ClusterHierarchy:
    """Multi-level clusters over the non-BS nodes.

    ``uplink`` maps every non-BS node to the node it reports to: the head of the
    cluster in which it is an ordinary member, or the BS for top-level heads.
    """

    k: int
    clusters: Tuple[Cluster, ...]
    uplink: Dict[int, int]
    bs: int

    def heads(self) -> List[int]:
        return sorted({c.head for c in self.clusters})

    def children_of(self, node: int) -> List[int]:
        return sorted(v for v, p in self.uplink.items() if p == node)

    def lowest_cluster(self) -> Dict[int, Cluster]:
        """Deepest-level cluster containing each node."""
        out: Dict[int, Cluster] = {}
        for c in self.clusters:
            for m in c.members:
                if m not in out or c.level > out[m].level:
                    out[m] = c
        return out

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "bs": self.bs,
            "clusters": [
                {"id": c.id, "head": c.head, "level": c.level, "members": list(c.members)}
                for c in self.clusters
            ],
            "uplink": {str(v): p for v, p in sorted(self.uplink.items())},
        }


def tree_discovery(nodes: Sequence[SensorNode], initiator: int, comm_range: float) -> BfsTree:
    """BFS tree over the unit-disk graph (edge iff distance <= comm_range).

    Each node's parent is the lowest-id neighbour one hop closer to the root.
    """
    by_id = {nd.id: nd for nd in nodes}
    if initiator not in by_id:
        raise ValueError(f"initiator {initiator} is not a deployed node")
    ids = sorted(by_id)
    adj: Dict[int, List[int]] = {i: [] for i in ids}
    for a_i, a in enumerate(ids):
        pa = by_id[a].pos
        for b in ids[a_i + 1:]:
            if euclidean_distance(pa, by_id[b].pos) <= comm_range:
                adj[a].append(b)
                adj[b].append(a)

    depth = {initiator: 0}
    queue = deque([initiator])
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if u not in depth:
                depth[u] = depth[v] + 1
                queue.append(u)
    missing = [i for i in ids if i not in depth]
    if missing:
        raise ConnectivityError(
            f"node {missing[0]} is unreachable from {initiator} within range {comm_range}"
            f" ({len(missing)} unreachable in total)"
        )

    parent = {}
    for v in ids:
        if v != initiator:
            parent[v] = min(u for u in adj[v] if depth[u] == depth[v] - 1)

    size = {v: 1 for v in ids}
    for v in sorted(ids, key=lambda i: -depth[i]):
        if v != initiator:
            size[parent[v]] += size[v]
    return BfsTree(initiator, parent, depth, size)


def _preorder(children: Dict[int, List[int]], root: int) -> List[int]:
    order, stack = [], [root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(reversed(children.get(v, [])))
    return order


def _clusters_at(v: int, kids: List[int], pending: Dict[int, List[int]], k: int):
    """Cluster ``v`` plus the pending subtrees of ``kids`` (ascending ids).

    Under 2k nodes this is one cluster headed by ``v``.  Otherwise the child
    subtrees are packed greedily into groups, closing a group as soon as it
    reaches k nodes (so it stays below 2k); each group is headed by its
    lowest-id child root, i.e. a member one hop from ``v``.  ``v`` heads the
    leftover group together with itself.
    """
    size = 1 + sum(len(pending[c]) for c in kids)
    if size < 2 * k:
        return [(v, [v] + [m for c in kids for m in pending[c]])]
    out = []
    acc: List[int] = []
    roots: List[int] = []
    for c in kids:
        acc.extend(pending[c])
        roots.append(c)
        if len(acc) >= k:
            out.append((min(roots), acc))
            acc, roots = [], []
    out.append((v, [v] + acc))
    return out


def _form_level(children: Dict[int, List[int]], root: int, k: int):
    """One bottom-up pass; returns (clusters as (head, members), promoted nodes)."""
    pending: Dict[int, List[int]] = {}
    clusters = []
    promoted: List[int] = []
    for v in reversed(_preorder(children, root)):
        kids = [c for c in children.get(v, []) if c in pending]
        size = 1 + sum(len(pending[c]) for c in kids)
        if size >= k:
            clusters.extend(_clusters_at(v, kids, pending, k))
        elif v == root:
            promoted = [v] + [m for c in kids for m in pending[c]]
        else:
            pending[v] = [v] + [m for c in kids for m in pending[c]]
        for c in kids:
            del pending[c]
    return clusters, promoted


def _form_subtree(children: Dict[int, List[int]], parent: Dict[int, int], root: int, k: int):
    """All levels for the subtree under ``root``; returns levels bottom-up."""
    levels = []
    nodes = _preorder(children, root)
    while True:
        clusters, promoted = _form_level(children, root, k)
        if not clusters:
            levels.append([(root, nodes)])
            break
        if len(clusters) == 1 and not promoted:
            levels.append(clusters)
            break
        rep = {}
        for head, members in clusters:
            for m in members:
                rep[m] = head
        for m in promoted:
            rep[m] = m
        next_nodes = sorted(set(rep.values()))
        levels.append(clusters)
        if len(next_nodes) == len(nodes):
            # no contraction possible (k = 1): close with one top cluster
            levels.append([(root, next_nodes)])
            break
        parent = {v: rep[parent[v]] for v in next_nodes if v != root}
        children = {v: [] for v in next_nodes}
        for v, p in parent.items():
            children[p].append(v)
        for v in children:
            children[v].sort()
        nodes = next_nodes
    return levels


def cluster_formation(tree: BfsTree, k: int) -> ClusterHierarchy:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    all_children = tree.children()
    raw = []
    for top in all_children[tree.root]:
        levels = _form_subtree(all_children, dict(tree.parent), top, k)
        depth = len(levels)
        for i, level in enumerate(levels):
            for head, members in level:
                raw.append((depth - i, head, tuple(sorted(members))))
    raw.sort()
    clusters = tuple(Cluster(i, head, members, level) for i, (level, head, members) in enumerate(raw))

    uplink = {}
    for c in clusters:
        for m in c.members:
            if m != c.head:
                uplink[m] = c.head
    for v in tree.parent:
        uplink.setdefault(v, tree.root)
    return ClusterHierarchy(k, clusters, dict(sorted(uplink.items())), tree.root)


def assign_roles(h: ClusterHierarchy, nodes: Sequence[SensorNode]) -> List[SensorNode]:
    """Copy of ``nodes`` with roles and parent/children links from the hierarchy.

    A node with at least one child is a CH, every other non-BS node an NCH.
    """
    kids: Dict[int, List[int]] = {nd.id: [] for nd in nodes}
    for v, p in h.uplink.items():
        kids[p].append(v)
    out = []
    for nd in nodes:
        if nd.id == h.bs:
            role, parent = Role.BS, None
        else:
            role = Role.CH if kids[nd.id] else Role.NCH
            parent = h.uplink[nd.id]
        out.append(dataclasses.replace(nd, role=role, parent=parent, children=sorted(kids[nd.id])))
    return out
