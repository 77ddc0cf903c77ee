"""Hata graph, connectivity, spanning graphs, eventually periodic walks.

The Hata graph of the attractor has one vertex per map and an edge {i, j}
exactly when the i-th and j-th first-level pieces intersect; it is connected
if and only if the attractor is. From a trimmed finite-type neighbor graph
the pieces intersect exactly when the basic map S_j^-1 o S_i survived, so the
Hata graph falls out of the neighbor computation for free.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import Inconclusive, NotConnected, NoWalk
from .geometry import CanonicalKey
from .ifs import IFS
from .neighbor import FINITE_TYPE, Label, NeighborEdge, NeighborGraph


@dataclass(frozen=True)
class HataGraph:
    """Undirected graph on vertices 1..n, no self-loops."""

    n: int
    edges: frozenset[tuple[int, int]]  # pairs (i, j) with i < j

    def neighbors(self, i: int) -> list[int]:
        out = []
        for a, b in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)


def hata_graph(ifs: IFS, delta: NeighborGraph) -> HataGraph:
    """Hata graph of the attractor, read off the trimmed neighbor graph."""
    if delta.status != FINITE_TYPE:
        raise Inconclusive(
            "neighbor graph exploration hit its cap; Hata graph unknown"
        )
    edges = set()
    for i in range(1, ifs.n + 1):
        for j in range(i + 1, ifs.n + 1):
            if delta.basic_survives(j, i) or delta.basic_survives(i, j):
                edges.add((i, j))
    return HataGraph(ifs.n, frozenset(edges))


def is_connected(h: HataGraph) -> bool:
    if h.n == 0:
        return True
    seen = {1}
    queue = deque([1])
    while queue:
        v = queue.popleft()
        for w in h.neighbors(v):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == h.n


def spanning_tree(h: HataGraph, full: bool = False) -> HataGraph:
    """BFS tree from vertex 1 (neighbors in ascending order), or h itself.

    Any connected subgraph on the full vertex set is a valid spanning graph;
    the tree is the smallest one and the deterministic default.
    """
    if not is_connected(h):
        raise NotConnected("Hata graph is disconnected; no spanning graph")
    if full:
        return h
    edges = set()
    seen = {1}
    queue = deque([1])
    while queue:
        v = queue.popleft()
        for w in h.neighbors(v):
            if w not in seen:
                seen.add(w)
                edges.add((min(v, w), max(v, w)))
                queue.append(w)
    return HataGraph(h.n, frozenset(edges))


@dataclass(frozen=True)
class EPWalk:
    """A walk entering a closed label cycle: path edges then cycle edges."""

    start: CanonicalKey
    path: tuple[NeighborEdge, ...]
    cycle: tuple[NeighborEdge, ...]


def _bfs_order(delta: NeighborGraph, start: CanonicalKey):
    """Vertices in BFS order from start with the edge-paths that reached them."""
    paths: dict[CanonicalKey, tuple[NeighborEdge, ...]] = {start: ()}
    order = [start]
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for e in delta.out_edges(v):
            if e.dst not in paths:
                paths[e.dst] = paths[v] + (e,)
                order.append(e.dst)
                queue.append(e.dst)
    return order, paths


def _self_loops(delta: NeighborGraph, v: CanonicalKey) -> list[NeighborEdge]:
    return [e for e in delta.out_edges(v) if e.dst == v]


def _shortest_cycle_length(delta: NeighborGraph, v: CanonicalKey) -> int | None:
    """Length of the shortest closed walk through v (None if v is on no cycle)."""
    dist: dict[CanonicalKey, int] = {}
    queue = deque()
    for e in delta.out_edges(v):
        if e.dst == v:
            return 1
        if e.dst not in dist:
            dist[e.dst] = 1
            queue.append(e.dst)
    while queue:
        u = queue.popleft()
        for e in delta.out_edges(u):
            if e.dst == v:
                return dist[u] + 1
            if e.dst not in dist:
                dist[e.dst] = dist[u] + 1
                queue.append(e.dst)
    return None


def _dist_to(delta: NeighborGraph, target: CanonicalKey) -> dict[CanonicalKey, int]:
    """Shortest path lengths into target, over reversed edges."""
    back: dict[CanonicalKey, list[CanonicalKey]] = {}
    for e in delta.edges:
        back.setdefault(e.dst, []).append(e.src)
    dist = {target: 0}
    queue = deque([target])
    while queue:
        u = queue.popleft()
        for w in back.get(u, ()):
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def _lex_min_cycle(
    delta: NeighborGraph, v: CanonicalKey, length: int
) -> tuple[NeighborEdge, ...]:
    """Lexicographically smallest label sequence closing a length-`length`
    walk at v. Exists by construction when length came from
    _shortest_cycle_length; the depth-first search tries labels in sorted
    order and prunes with exact distances back to v."""
    dist_back = _dist_to(delta, v)

    def walk(u: CanonicalKey, depth: int) -> tuple[NeighborEdge, ...] | None:
        for e in delta.out_edges(u):  # already sorted by (label, dst)
            if depth + 1 == length:
                if e.dst == v:
                    return (e,)
                continue
            remaining = dist_back.get(e.dst)
            if remaining is None or depth + 1 + remaining > length:
                continue
            rest = walk(e.dst, depth + 1)
            if rest is not None:
                return (e,) + rest
        return None

    cycle = walk(v, 0)
    if cycle is None:  # pragma: no cover - guarded by the length computation
        raise NoWalk("no cycle of the computed length; graph inconsistent")
    return cycle


def find_ep_walk(
    delta: NeighborGraph,
    start: CanonicalKey,
    policy: str = "self-loop",
    cycle_labels: list[Label] | None = None,
) -> EPWalk:
    """An eventually periodic walk in the neighbor graph from start.

    Policies:
      * "self-loop": BFS to the nearest vertex carrying a self-loop, taking
        the smallest self-loop label there. Falls back to "shortest" when no
        self-loop is reachable (one-sided edge labels can never form
        self-loops, and some uniform systems have none either).
      * "shortest": nearest vertex lying on a cycle, with the shortest cycle
        through it, lexicographically smallest labels first.
      * "cycle": use the rotation of cycle_labels that closes at start.

    On a trimmed finite-type graph every vertex has out-degree >= 1, so some
    cycle is always reachable and NoWalk only signals inconsistent input.
    """
    if start not in delta.vertices:
        raise NoWalk(f"start vertex {start} is not in the neighbor graph")

    if policy == "cycle":
        if not cycle_labels:
            raise ValueError("policy 'cycle' needs a nonempty cycle_labels list")
        for rot in range(len(cycle_labels)):
            labels = cycle_labels[rot:] + cycle_labels[:rot]
            edges = []
            cur = start
            for lab in labels:
                nxt = next(
                    (e for e in delta.out_edges(cur) if e.label == lab), None
                )
                if nxt is None:
                    break
                edges.append(nxt)
                cur = nxt.dst
            else:
                if cur == start:
                    return EPWalk(start, (), tuple(edges))
        raise NoWalk("no rotation of the given cycle closes at the start vertex")

    if policy not in ("self-loop", "shortest"):
        raise ValueError(f"unknown walk policy {policy!r}")

    order, paths = _bfs_order(delta, start)

    if policy == "self-loop":
        for v in order:
            loops = _self_loops(delta, v)
            if loops:
                return EPWalk(start, paths[v], (loops[0],))
        policy = "shortest"

    best: tuple[int, int, CanonicalKey] | None = None
    for rank, v in enumerate(order):
        length = _shortest_cycle_length(delta, v)
        if length is not None:
            best = (rank, length, v)
            break
    if best is None:
        raise NoWalk("no cycle is reachable from the start vertex")
    _, length, v = best
    return EPWalk(start, paths[v], _lex_min_cycle(delta, v, length))
