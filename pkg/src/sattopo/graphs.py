"""Discrete topology extraction, the +Grid baseline, and graph statistics."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .core import FeasibleSpec
from .errors import ValidationError
from .scenario import BodyKind, Scenario, propagate


@dataclass(frozen=True)
class TopologyGraph:
    n: int
    edges: frozenset[tuple[int, int]]  # unordered pairs stored as (min, max)

    def degree(self, i: int) -> int:
        return sum(1 for e in self.edges if i in e)

    def adjacency_lists(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def edge_list_text(self) -> str:
        lines = [f"{i} {j}" for i, j in sorted(self.edges)]
        return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class GraphMetrics:
    edges: int
    avg_degree: float
    density: float
    connected_components: int
    avg_shortest_path: float
    avg_clustering: float

    def to_dict(self) -> dict:
        return {
            "E": self.edges,
            "a_deg": self.avg_degree,
            "density": self.density,
            "cc": self.connected_components,
            "a_sp": self.avg_shortest_path,
            "a_c": self.avg_clustering,
        }


def extract_graph(
    x: np.ndarray, spec: FeasibleSpec, weight_floor: float = 0.5
) -> TopologyGraph:
    """Greedy rounding of a feasible Laplacian point into a graph.

    Candidate pairs sorted by |x_ij| descending (ties by id pair
    ascending); a pair is accepted iff its weight clears weight_floor and
    both endpoints are below their integer degree caps.
    """
    n = spec.n
    caps = [
        spec.max_isl if k is BodyKind.SATELLITE else spec.max_bsl for k in spec.kinds
    ]
    candidates = []
    for i in range(n):
        for j in range(i + 1, n):
            w = abs(x[i, j])
            if w >= weight_floor:
                candidates.append((-w, i, j))
    candidates.sort()
    degree = [0] * n
    edges = set()
    for _, i, j in candidates:
        if degree[i] < caps[i] and degree[j] < caps[j]:
            edges.add((i, j))
            degree[i] += 1
            degree[j] += 1
    return TopologyGraph(n=n, edges=frozenset(edges))


def plus_grid(
    scenario: Scenario, t: float = 0.0, wrap_planes: bool = False
) -> TopologyGraph:
    """Baseline: ring neighbors in-plane plus nearest neighbor per adjacent plane.

    Plane adjacency is linear (plane p borders p-1 and p+1 only) unless
    wrap_planes is set; the missing wraparound is the seam between
    counter-rotating planes. Requires a plane-structured, station-free,
    multi-plane scenario.
    """
    if any(b.kind is BodyKind.BASE_STATION for b in scenario.bodies):
        raise ValidationError("+Grid is defined for satellite-only scenarios")
    if any(b.plane is None or b.slot is None for b in scenario.bodies):
        raise ValidationError("+Grid requires a plane-structured scenario")
    planes: dict[int, list] = {}
    for b in scenario.bodies:
        planes.setdefault(b.plane, []).append(b)
    for members in planes.values():
        members.sort(key=lambda b: b.slot)
    num_planes = len(planes)
    if num_planes < 2:
        raise ValidationError("+Grid needs at least two orbital planes")
    positions = propagate(scenario, t)
    edges = set()

    def add(i: int, j: int) -> None:
        edges.add((min(i, j), max(i, j)))

    for members in planes.values():
        s = len(members)
        for k, b in enumerate(members):
            if s > 1:
                add(b.id, members[(k + 1) % s].id)
            if s > 2:
                add(b.id, members[(k - 1) % s].id)
    for p, members in planes.items():
        neighbors = [p - 1, p + 1]
        for q in neighbors:
            q_wrapped = q % num_planes if wrap_planes else q
            if q_wrapped not in planes or q_wrapped == p:
                continue
            cand_ids = [b.id for b in planes[q_wrapped]]
            cand_pos = positions[cand_ids]
            for b in members:
                dist = np.linalg.norm(cand_pos - positions[b.id], axis=1)
                add(b.id, cand_ids[int(np.argmin(dist))])
    return TopologyGraph(n=scenario.n, edges=frozenset(edges))


def metrics(graph: TopologyGraph) -> GraphMetrics:
    """The six statistics reported for each topology.

    Average shortest path is the mean BFS hop distance over unordered
    pairs within the same component (0 if no such pair exists); clustering
    counts a node of degree < 2 as 0.
    """
    n = graph.n
    if n < 2:
        raise ValidationError("metrics requires at least two nodes")
    e = len(graph.edges)
    adj = graph.adjacency_lists()
    # connected components via union-find
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in graph.edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    components = len({find(i) for i in range(n)})
    # mean BFS hop distance over same-component pairs
    total_dist = 0
    total_pairs = 0
    for src in range(n):
        dist = [-1] * n
        dist[src] = 0
        queue = deque([src])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        for v in range(src + 1, n):
            if dist[v] > 0:
                total_dist += dist[v]
                total_pairs += 1
    avg_sp = total_dist / total_pairs if total_pairs else 0.0
    # clustering coefficient
    neighbor_sets = [set(a) for a in adj]
    clustering_sum = 0.0
    for v in range(n):
        deg = len(neighbor_sets[v])
        if deg < 2:
            continue
        nbrs = sorted(neighbor_sets[v])
        links = 0
        for a_idx in range(len(nbrs)):
            for b_idx in range(a_idx + 1, len(nbrs)):
                if nbrs[b_idx] in neighbor_sets[nbrs[a_idx]]:
                    links += 1
        clustering_sum += 2.0 * links / (deg * (deg - 1))
    return GraphMetrics(
        edges=e,
        avg_degree=2.0 * e / n,
        density=2.0 * e / (n * (n - 1)),
        connected_components=components,
        avg_shortest_path=avg_sp,
        avg_clustering=clustering_sum / n,
    )
