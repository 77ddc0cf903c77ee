"""Neighbor maps and the neighbor graph.

A neighbor map S_J^-1 o S_I encodes the relative position of two cylinders
with non-comparable address words I, J; it is feasible when its contraction
ratio lies in the window (r_min, 1/r_min], i.e. the cylinders have comparable
size. The directed neighbor graph has feasible maps as vertices; walking an
edge extends the address words by one letter.

Membership of the true neighbor set (maps whose image of the attractor meets
the attractor) is decided by prune-then-trim:

  * pruning keeps only maps that move the invariant bounding ball close
    enough to overlap it, a sound over-approximation;
  * trimming then repeatedly deletes vertices with out-degree zero.

A vertex survives trimming exactly when it starts an infinite walk inside the
pruned set, and a compactness argument shows that such walks certify a
genuine intersection with the attractor, so on a finite graph the survivors
are exactly the true neighbors. When exploration would exceed the vertex cap
the graph is returned as-is with a cap_exceeded status: finiteness can then
not be decided, which is the honest answer for non finite type systems.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from .errors import NotSingleMatrix
from .geometry import (
    CanonicalKey,
    Similitude,
    canonical_key,
    compose,
    inverse,
)
from .ifs import (
    IFS,
    BoundingBall,
    Word,
    bounding_ball,
    detect_single_matrix,
    is_uniform_ratio,
)

FINITE_TYPE = "finite_type"
CAP_EXCEEDED = "cap_exceeded"

DEFAULT_MAX_VERTICES = 20_000

# Canonical-key grid and ball-pruning slack, relative to the ball radius.
KEY_QUANTUM_REL = 1e-9
PRUNE_SLACK_REL = 1e-9

# Upper feasibility bound gets a hair of relative tolerance so ratios equal
# to 1/r_min survive float drift; the lower bound stays strict as defined.
_FEAS_UPPER_TOL = 1e-12

# Edge labels: (j, i) acts as S_j^-1 o f o S_i, with 0 standing for the
# empty word. Uniform-ratio graphs use two-sided labels (j, i); general
# graphs use one-sided labels (j, 0) and (0, i).
Label = tuple[int, int]


def label_str(label: Label) -> str:
    j, i = label
    return f"({j if j else 'e'},{i if i else 'e'})"


@dataclass
class NeighborVertex:
    map: Similitude
    key: CanonicalKey
    witness: tuple[Word, Word] | None = None  # (direct I, inverse J)
    is_basic: bool = False


class NeighborEdge(NamedTuple):
    src: CanonicalKey
    dst: CanonicalKey
    label: Label


@dataclass
class NeighborGraph:
    ifs: IFS
    ball: BoundingBall
    quantum: float
    uniform: bool
    status: str
    vertices: dict[CanonicalKey, NeighborVertex]
    edges: tuple[NeighborEdge, ...]
    # (j, i) -> key of S_j^-1 o S_i, for every ordered pair with i != j.
    basic_keys: dict[tuple[int, int], CanonicalKey]
    adjacency: dict[CanonicalKey, tuple[NeighborEdge, ...]] = field(default_factory=dict)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def out_edges(self, key: CanonicalKey) -> tuple[NeighborEdge, ...]:
        return self.adjacency.get(key, ())

    def basic_survives(self, j: int, i: int) -> bool:
        """Whether the basic map S_j^-1 o S_i is a vertex of the trimmed graph."""
        return self.basic_keys[(j, i)] in self.vertices


def is_feasible(ifs: IFS, h: Similitude) -> bool:
    """Contraction ratio inside the window (r_min, 1/r_min]."""
    r = ifs.r_min
    return h.scale > r and h.scale <= (1.0 / r) * (1.0 + _FEAS_UPPER_TOL)


def ball_overlap_prune(h: Similitude, ball: BoundingBall, slack: float) -> bool:
    """Keep h only if h(B) can intersect B.

    |h(c) - c| <= (1 + scale) R holds whenever h maps any point of B into B,
    so this never discards a true neighbor.
    """
    c = ball.center_c
    return abs(h(c) - c) <= (1.0 + h.scale) * ball.radius + slack


def basic_neighbor_maps(ifs: IFS, quantum: float | None = None) -> list[NeighborVertex]:
    """All maps S_j^-1 o S_i for i != j, deduplicated by canonical key."""
    if quantum is None:
        quantum = KEY_QUANTUM_REL * bounding_ball(ifs).radius
    inv_maps = [inverse(m) for m in ifs.maps]
    out: dict[CanonicalKey, NeighborVertex] = {}
    for j in range(1, ifs.n + 1):
        for i in range(1, ifs.n + 1):
            if i == j:
                continue
            h = compose(inv_maps[j - 1], ifs.maps[i - 1])
            key = canonical_key(h, quantum)
            if key not in out:
                out[key] = NeighborVertex(h, key, witness=((i,), (j,)), is_basic=True)
    return list(out.values())


def successors(
    ifs: IFS,
    vertex: NeighborVertex,
    uniform: bool,
    inv_maps: list[Similitude] | None = None,
) -> Iterator[tuple[Label, Similitude, tuple[Word, Word] | None]]:
    """Feasible one-step extensions of a neighbor map.

    Uniform mode emits the N^2 candidates S_j^-1 o f o S_i labelled (j, i);
    general mode emits f o S_i labelled (0, i) and S_i^-1 o f labelled (i, 0).
    Candidates outside the feasibility window are dropped here; ball pruning
    is the caller's concern.
    """
    if inv_maps is None:
        inv_maps = [inverse(m) for m in ifs.maps]
    wit = vertex.witness
    if uniform:
        for j in range(1, ifs.n + 1):
            left = compose(inv_maps[j - 1], vertex.map)
            for i in range(1, ifs.n + 1):
                g = compose(left, ifs.maps[i - 1])
                if not is_feasible(ifs, g):
                    continue
                new_wit = (wit[0] + (i,), wit[1] + (j,)) if wit else None
                yield (j, i), g, new_wit
    else:
        for i in range(1, ifs.n + 1):
            g = compose(vertex.map, ifs.maps[i - 1])
            if is_feasible(ifs, g):
                new_wit = (wit[0] + (i,), wit[1]) if wit else None
                yield (0, i), g, new_wit
            g = compose(inv_maps[i - 1], vertex.map)
            if is_feasible(ifs, g):
                new_wit = (wit[0], wit[1] + (i,)) if wit else None
                yield (i, 0), g, new_wit


def _trim(
    vertices: dict[CanonicalKey, NeighborVertex],
    edges: list[NeighborEdge],
) -> tuple[dict[CanonicalKey, NeighborVertex], list[NeighborEdge]]:
    """Iteratively delete vertices with out-degree zero and their in-edges."""
    outdeg = {k: 0 for k in vertices}
    in_edges: dict[CanonicalKey, list[NeighborEdge]] = {k: [] for k in vertices}
    for e in edges:
        outdeg[e.src] += 1
        in_edges[e.dst].append(e)
    dead = deque(k for k, d in outdeg.items() if d == 0)
    removed: set[CanonicalKey] = set()
    while dead:
        k = dead.popleft()
        if k in removed:
            continue
        removed.add(k)
        for e in in_edges[k]:
            if e.src in removed:
                continue
            outdeg[e.src] -= 1
            if outdeg[e.src] == 0:
                dead.append(e.src)
    kept_vertices = {k: v for k, v in vertices.items() if k not in removed}
    kept_edges = [e for e in edges if e.src not in removed and e.dst not in removed]
    return kept_vertices, kept_edges


def build_neighbor_graph(
    ifs: IFS,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    mode: str = "auto",
) -> NeighborGraph:
    """BFS over feasible, ball-pruned neighbor maps, then trim.

    mode is "auto" (uniform edge rule exactly when all ratios agree),
    "uniform" or "general". Returns status cap_exceeded with the partial,
    untrimmed graph when the vertex cap is hit.
    """
    if mode not in ("auto", "uniform", "general"):
        raise ValueError(f"unknown mode {mode!r}")
    uniform = is_uniform_ratio(ifs) if mode == "auto" else (mode == "uniform")
    ball = bounding_ball(ifs)
    quantum = KEY_QUANTUM_REL * ball.radius
    slack = PRUNE_SLACK_REL * ball.radius
    inv_maps = [inverse(m) for m in ifs.maps]

    vertices: dict[CanonicalKey, NeighborVertex] = {}
    edges: list[NeighborEdge] = []
    # Queue entries carry the raw map data so the hot loop below stays free
    # of attribute lookups: (key, a, t, reflect, witness).
    queue: deque = deque()

    for v in basic_neighbor_maps(ifs, quantum):
        if ball_overlap_prune(v.map, ball, slack):
            vertices[v.key] = v
            queue.append((v.key, v.map.a, v.map.t, v.map.reflect, v.witness))
    capped = len(vertices) > max_vertices

    map_data = [(m.a, m.t, m.reflect) for m in ifs.maps]
    inv_data = [(m.a, m.t, m.reflect) for m in inv_maps]
    c = ball.center_c
    radius = ball.radius
    r_lo = ifs.r_min
    r_hi = (1.0 / ifs.r_min) * (1.0 + _FEAS_UPPER_TOL)
    qi = 1.0 / quantum
    n = ifs.n

    # The loop below is successors() + ball_overlap_prune() + canonical_key()
    # fused together on raw complex numbers; it only allocates objects for
    # maps that actually become vertices.
    def consider(src_key, label, ga, gt, gref, wit):
        scale = abs(ga)
        if scale <= r_lo or scale > r_hi:
            return False
        hc = ga * c.conjugate() + gt if gref else ga * c + gt
        if abs(hc - c) > (1.0 + scale) * radius + slack:
            return False
        key = (
            int(gref),
            round(ga.real * qi),
            round(ga.imag * qi),
            round(gt.real * qi),
            round(gt.imag * qi),
        )
        known = vertices.get(key)
        if known is None:
            g = Similitude.from_linear(ga, gt, gref)
            vertices[key] = NeighborVertex(g, key, witness=wit())
            queue.append((key, ga, gt, gref, vertices[key].witness))
        elif (
            known.map.reflect != gref
            or abs(known.map.a - ga) > 8.0 * quantum
            or abs(known.map.t - gt) > 8.0 * quantum
        ):
            raise RuntimeError(
                "canonical key collision between distinct maps; "
                "the key quantum is too coarse for this system"
            )
        edges.append(NeighborEdge(src_key, key, label))
        return len(vertices) > max_vertices

    while queue and not capped:
        src_key, va, vt, vref, vwit = queue.popleft()
        wi, wj = vwit if vwit is not None else ((), ())
        if uniform:
            for j in range(n):
                ja, jt, jref = inv_data[j]
                if jref:
                    wa, wt, wref = ja * va.conjugate(), ja * vt.conjugate() + jt, not vref
                else:
                    wa, wt, wref = ja * va, ja * vt + jt, vref
                jl = j + 1
                for i in range(n):
                    ia, it, iref = map_data[i]
                    if wref:
                        ga, gt, gref = wa * ia.conjugate(), wa * it.conjugate() + wt, not iref
                    else:
                        ga, gt, gref = wa * ia, wa * it + wt, iref
                    il = i + 1
                    if consider(
                        src_key, (jl, il), ga, gt, gref,
                        lambda il=il, jl=jl: (wi + (il,), wj + (jl,)),
                    ):
                        capped = True
                        break
                if capped:
                    break
        else:
            for i in range(n):
                ia, it, iref = map_data[i]
                il = i + 1
                # right-compose: g = v o S_i
                if vref:
                    ga, gt, gref = va * ia.conjugate(), va * it.conjugate() + vt, not iref
                else:
                    ga, gt, gref = va * ia, va * it + vt, iref
                if consider(
                    src_key, (0, il), ga, gt, gref, lambda il=il: (wi + (il,), wj)
                ):
                    capped = True
                    break
                # left-compose: g = S_i^-1 o v
                ja, jt, jref = inv_data[i]
                if jref:
                    ga, gt, gref = ja * va.conjugate(), ja * vt.conjugate() + jt, not vref
                else:
                    ga, gt, gref = ja * va, ja * vt + jt, vref
                if consider(
                    src_key, (il, 0), ga, gt, gref, lambda il=il: (wi, wj + (il,))
                ):
                    capped = True
                    break

    status = CAP_EXCEEDED if capped else FINITE_TYPE
    if not capped:
        vertices, edges = _trim(vertices, edges)

    vertices = dict(sorted(vertices.items()))
    edges_t = tuple(sorted(edges, key=lambda e: (e.src, e.label, e.dst)))
    adjacency: dict[CanonicalKey, list[NeighborEdge]] = {k: [] for k in vertices}
    for e in edges_t:
        adjacency[e.src].append(e)

    basic_keys = {}
    for j in range(1, ifs.n + 1):
        for i in range(1, ifs.n + 1):
            if i != j:
                h = compose(inv_maps[j - 1], ifs.maps[i - 1])
                basic_keys[(j, i)] = canonical_key(h, quantum)

    return NeighborGraph(
        ifs=ifs,
        ball=ball,
        quantum=quantum,
        uniform=uniform,
        status=status,
        vertices=vertices,
        edges=edges_t,
        basic_keys=basic_keys,
        adjacency={k: tuple(v) for k, v in adjacency.items()},
    )


@dataclass(frozen=True)
class DStarReport:
    min_gap: float
    count: int
    horizon: int
    bound: float


def dstar_discreteness_check(
    ifs: IFS,
    horizon: int = 8,
    bound: float | None = None,
) -> DStarReport:
    """Enumerate difference-set sums of a single-matrix IFS and measure gaps.

    The enumerated set consists of all sums over k < n of (rM)^-k x_k with
    x_k a digit difference and n <= horizon, restricted to norm <= bound.
    A minimum pairwise gap bounded away from zero across growing horizons is
    evidence (not proof) that the system is of finite type; gaps collapsing
    toward zero are evidence against. Raises NotSingleMatrix when the maps do
    not share one linear part.
    """
    smf = detect_single_matrix(ifs)
    if smf is None:
        raise NotSingleMatrix("the maps do not share a single linear part")
    if bound is None:
        bound = 2.0 * bounding_ball(ifs).radius

    digits = np.array([complex(d.x, d.y) for d in smf.digits])
    deltas = np.unique((digits[:, None] - digits[None, :]).ravel())
    a, reflect = smf.linear.a, smf.linear.reflect

    q = 1.0 / abs(a)  # expansion factor of (rM)^-1, > 1 for contractions
    max_delta = float(np.max(np.abs(deltas)))
    # Partial Horner sums of any element with final norm <= bound stay below
    # this working radius, so pruning at it loses nothing.
    working = bound + max_delta / (q - 1.0) + 1e-9
    quantum = 1e-9
    # Values stay exact; the grid only keys the dedup. Entries closer than
    # merge_tol are one element seen twice across grid-cell boundaries.
    merge_tol = 10.0 * quantum

    def keys_of(values: np.ndarray) -> np.ndarray:
        return np.round(values.real / quantum) + 1j * np.round(values.imag / quantum)

    def dedup(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        keys, idx = np.unique(keys_of(values), return_index=True)
        return keys, values[idx]

    def expand(values: np.ndarray) -> np.ndarray:
        grown = np.conj(values) / np.conj(a) if reflect else values / a
        chunks = []
        for lo in range(0, grown.size, 65536):
            cand = (grown[lo : lo + 65536, None] + deltas[None, :]).ravel()
            chunks.append(cand[np.abs(cand) <= working])
        if not chunks:
            return np.array([], dtype=np.complex128)
        return np.concatenate(chunks)

    seen_keys = np.array([], dtype=np.complex128)
    seen_vals = np.array([], dtype=np.complex128)
    frontier = deltas[np.abs(deltas) <= working]
    for _ in range(horizon):
        if frontier.size == 0:
            break
        keys, vals = dedup(frontier)
        fresh = ~np.isin(keys, seen_keys)
        if not fresh.any():
            break
        seen_keys = np.concatenate([seen_keys, keys[fresh]])
        seen_vals = np.concatenate([seen_vals, vals[fresh]])
        frontier = expand(vals[fresh])

    collected = seen_vals[np.abs(seen_vals) <= bound]
    if collected.size < 2:
        return DStarReport(math.inf, int(collected.size), horizon, bound)

    # Merge grid-boundary twins before measuring: same element, two keys.
    pts = np.column_stack([collected.real, collected.imag])
    tree = cKDTree(pts)
    twins = tree.query_pairs(merge_tol, output_type="ndarray")
    drop = set(int(b) for _, b in twins)
    if drop:
        keep = np.array([k for k in range(collected.size) if k not in drop])
        pts = pts[keep]
        tree = cKDTree(pts)
    count = int(pts.shape[0])
    if count < 2:
        return DStarReport(math.inf, count, horizon, bound)
    dist, _ = tree.query(pts, k=2)
    return DStarReport(float(dist[:, 1].min()), count, horizon, bound)
