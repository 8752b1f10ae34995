"""Communication graph construction and structure analysis.

Nodes are trajectory indices.  Each edge carries the undirected line angle
beta in [0, pi), the two link positions (angles in circle mode, arc lengths
in path mode) and the link distance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DisconnectedGraphError, InvalidInstanceError
from .geometry import (ANGLE_TOL, Circle, ClosedPath, center_distance,
                       line_angle, line_angle_points, link_positions,
                       min_distance)


def edge_key(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class EdgeData:
    beta: float          # undirected line angle, [0, pi)
    phi: dict            # node -> link position on that node's trajectory
    distance: float      # length of the communication link


@dataclass
class CommGraph:
    n: int
    edges: dict = field(default_factory=dict)  # (i, j) i<j -> EdgeData
    mode: str = "circle"                       # "circle" | "path"
    lengths: list | None = None                # trajectory lengths (path mode)

    def has_edge(self, i: int, j: int) -> bool:
        return edge_key(i, j) in self.edges

    def edge(self, i: int, j: int) -> EdgeData:
        return self.edges[edge_key(i, j)]

    def beta(self, i: int, j: int) -> float:
        return self.edge(i, j).beta

    def phi(self, i: int, j: int) -> float:
        """Link position of i with respect to j."""
        return self.edge(i, j).phi[i]

    def neighbors(self, i: int) -> list[int]:
        out = []
        for (a, b) in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)

    def degree(self, i: int) -> int:
        return len(self.neighbors(i))

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def subgraph(self, keep_edges) -> "CommGraph":
        keep = {edge_key(*e) for e in keep_edges}
        return replace(self, edges={k: v for k, v in self.edges.items() if k in keep})

    def components(self) -> list[list[int]]:
        seen = set()
        comps = []
        for start in range(self.n):
            if start in seen:
                continue
            comp, stack = [], [start]
            seen.add(start)
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in self.neighbors(u):
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1


@dataclass
class Coloring:
    classes: list  # per node: "A" | "B"

    def side(self, i: int) -> str:
        return self.classes[i]


def build_circle_graph(circles: list[Circle], r: float) -> CommGraph:
    """Proximity graph of unit circles: edge iff center distance <= 2 + r."""
    n = len(circles)
    for i, j in itertools.combinations(range(n), 2):
        if center_distance(circles[i], circles[j]) <= circles[i].radius + circles[j].radius:
            raise InvalidInstanceError(f"circles {i} and {j} overlap")
    edges = {}
    for i, j in itertools.combinations(range(n), 2):
        d = center_distance(circles[i], circles[j])
        threshold = circles[i].radius + circles[j].radius + r
        if d <= threshold:
            phi_ij, phi_ji = link_positions(circles[i], circles[j])
            edges[(i, j)] = EdgeData(
                beta=line_angle(circles[i], circles[j]),
                phi={i: phi_ij, j: phi_ji},
                distance=d - circles[i].radius - circles[j].radius,
            )
    return CommGraph(n=n, edges=edges, mode="circle")


def build_path_graph(paths: list[ClosedPath], ranges: list[float]) -> CommGraph:
    """Proximity graph of closed paths: edge iff min distance <= min of the two ranges."""
    n = len(paths)
    edges = {}
    for i, j in itertools.combinations(range(n), 2):
        d, si, sj = min_distance(paths[i], paths[j])
        if d <= min(ranges[i], ranges[j]):
            pi = paths[i].position_at(si)
            pj = paths[j].position_at(sj)
            edges[(i, j)] = EdgeData(
                beta=line_angle_points(pi, pj),
                phi={i: si, j: sj},
                distance=d,
            )
    return CommGraph(n=n, edges=edges, mode="path",
                     lengths=[p.length for p in paths])


def two_color(g: CommGraph):
    """2-color the graph.

    Returns (Coloring, None) on success or (None, witness) where witness is an
    odd cycle as a node sequence.
    """
    color = [None] * g.n
    parent = [None] * g.n
    for start in range(g.n):
        if color[start] is not None:
            continue
        color[start] = "A"
        queue = [start]
        while queue:
            u = queue.pop(0)
            for v in g.neighbors(u):
                if color[v] is None:
                    color[v] = "B" if color[u] == "A" else "A"
                    parent[v] = u
                    queue.append(v)
                elif color[v] == color[u]:
                    return None, _odd_cycle_witness(parent, u, v)
    return Coloring(classes=color), None


def _odd_cycle_witness(parent, u, v):
    """Close the cycle through the BFS-tree paths of two same-color neighbors."""
    path_u, path_v = [u], [v]
    seen = {u: 0}
    x = u
    while parent[x] is not None:
        x = parent[x]
        seen[x] = len(path_u)
        path_u.append(x)
    x = v
    while x not in seen:
        x = parent[x]
        path_v.append(x)
    # x is the lowest common ancestor
    cycle = path_u[:seen[x] + 1] + path_v[-2::-1]
    return cycle


def is_bipartite(g: CommGraph) -> bool:
    return two_color(g)[0] is not None


# Exhaustive max-cut search is exact up to this many edges; larger graphs
# fall back to the local-move heuristic.
EXACT_MAXCUT_EDGE_LIMIT = 24


def max_bipartite_subgraph(g: CommGraph) -> CommGraph:
    """Edge-maximum bipartite subgraph (exact for small graphs, greedy beyond)."""
    coloring, _ = two_color(g)
    if coloring is not None:
        return g
    if len(g.edges) <= EXACT_MAXCUT_EDGE_LIMIT:
        sides = _exact_max_cut(g)
    else:
        sides = _greedy_max_cut(g)
    keep = [e for e in g.edges if sides[e[0]] != sides[e[1]]]
    return g.subgraph(keep)


def _exact_max_cut(g: CommGraph):
    sides = [0] * g.n
    for comp in g.components():
        comp_edges = [e for e in g.edges if e[0] in comp]
        if not comp_edges:
            continue
        index = {node: k for k, node in enumerate(comp)}
        m = len(comp)
        ii = np.array([index[a] for a, b in comp_edges])
        jj = np.array([index[b] for a, b in comp_edges])
        best_count, best_mask = -1, 0
        # Fix comp[0] on side 0; enumerate the rest in chunks.
        total = 1 << (m - 1)
        chunk = 1 << 20
        for lo in range(0, total, chunk):
            masks = np.arange(lo, min(lo + chunk, total), dtype=np.uint64) << np.uint64(1)
            bits_i = (masks[:, None] >> ii.astype(np.uint64)) & np.uint64(1)
            bits_j = (masks[:, None] >> jj.astype(np.uint64)) & np.uint64(1)
            counts = np.sum(bits_i != bits_j, axis=1)
            k = int(np.argmax(counts))
            if counts[k] > best_count:
                best_count = int(counts[k])
                best_mask = int(masks[k])
        for node in comp:
            sides[node] = (best_mask >> index[node]) & 1
    return sides


def _greedy_max_cut(g: CommGraph):
    """Local search: move any node whose own side holds a strict majority of its edges."""
    sides = [i & 1 for i in range(g.n)]
    improved = True
    while improved:
        improved = False
        for u in range(g.n):
            same = sum(1 for v in g.neighbors(u) if sides[v] == sides[u])
            diff = g.degree(u) - same
            if same > diff:
                sides[u] = 1 - sides[u]
                improved = True
    return sides


def cycle_alternating_beta_sum(cycle, g: CommGraph) -> float:
    """Alternating sum beta(c0,c1) - beta(c1,c2) + ... - beta(c_last,c0)."""
    total = 0.0
    k = len(cycle)
    for idx in range(k):
        a, b = cycle[idx], cycle[(idx + 1) % k]
        term = g.beta(a, b)
        total += term if idx % 2 == 0 else -term
    return total


def cycle_feasible_opposite(cycle, g: CommGraph, tol: float = ANGLE_TOL) -> bool:
    """Whether an even cycle admits opposite-direction synchronization.

    The test is that the alternating sum of the edge line angles is congruent
    to 0 mod pi within tol.
    """
    if len(cycle) % 2 != 0:
        raise ValueError(f"cycle length must be even, got {len(cycle)}")
    for idx in range(len(cycle)):
        a, b = cycle[idx], cycle[(idx + 1) % len(cycle)]
        if not g.has_edge(a, b):
            raise ValueError(f"({a},{b}) is not an edge")
    return cycle_residue(cycle, g) <= tol


def cycle_residue(cycle, g: CommGraph) -> float:
    """Distance of the alternating beta sum from the nearest multiple of pi."""
    s = cycle_alternating_beta_sum(cycle, g)
    r = math.fmod(s, math.pi)
    if r < 0:
        r += math.pi
    return min(r, math.pi - r)


def spanning_tree(g: CommGraph, root: int = 0):
    """BFS spanning tree (forest) edges; neighbor visits in ascending index order."""
    tree, seen = [], set()
    for start in [root] + [i for i in range(g.n) if i != root]:
        if start in seen:
            continue
        seen.add(start)
        queue = [start]
        while queue:
            u = queue.pop(0)
            for v in g.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    tree.append(edge_key(u, v))
                    queue.append(v)
    return tree


def fundamental_cycle(tree_adj, parent, depth, chord):
    """Node sequence of the cycle that a chord closes in a rooted tree."""
    u, v = chord
    pu, pv = [u], [v]
    while depth[pu[-1]] > depth[pv[-1]]:
        pu.append(parent[pu[-1]])
    while depth[pv[-1]] > depth[pu[-1]]:
        pv.append(parent[pv[-1]])
    while pu[-1] != pv[-1]:
        pu.append(parent[pu[-1]])
        pv.append(parent[pv[-1]])
    return pu + pv[-2::-1]


def _root_tree(g: CommGraph, tree_edges):
    adj = {i: [] for i in range(g.n)}
    for a, b in tree_edges:
        adj[a].append(b)
        adj[b].append(a)
    parent = [None] * g.n
    depth = [0] * g.n
    seen = set()
    for start in range(g.n):
        if start in seen:
            continue
        seen.add(start)
        stack = [start]
        while stack:
            u = stack.pop()
            for v in sorted(adj[u]):
                if v not in seen:
                    seen.add(v)
                    parent[v] = u
                    depth[v] = depth[u] + 1
                    stack.append(v)
    return adj, parent, depth


def cycle_basis(g: CommGraph):
    """Fundamental cycles of the BFS spanning tree, one per chord."""
    tree = spanning_tree(g)
    tree_set = set(tree)
    adj, parent, depth = _root_tree(g, tree)
    return [fundamental_cycle(adj, parent, depth, e)
            for e in g.edge_list() if e not in tree_set]


def max_synch_subgraph(g: CommGraph, tol: float = ANGLE_TOL) -> CommGraph:
    """Keep the spanning tree and every chord whose fundamental cycle is feasible.

    Requires a bipartite input.  Every simple cycle of the result passes
    cycle_feasible_opposite (alternating beta sums add over symmetric
    differences).
    """
    coloring, witness = two_color(g)
    if coloring is None:
        raise ValueError(f"graph is not bipartite (odd cycle {witness})")
    tree = spanning_tree(g)
    tree_set = set(tree)
    adj, parent, depth = _root_tree(g, tree)
    keep = list(tree)
    for e in g.edge_list():
        if e in tree_set:
            continue
        cyc = fundamental_cycle(adj, parent, depth, e)
        if cycle_feasible_opposite(cyc, g, tol=tol):
            keep.append(e)
    return g.subgraph(keep)


def dfs_tree(g: CommGraph, root: int):
    """DFS tree edge set from root; neighbors visited in ascending index order."""
    comps = g.components()
    if len(comps) > 1:
        raise DisconnectedGraphError(
            f"graph is disconnected ({len(comps)} components)", components=comps)
    seen = {root}
    tree = []

    def visit(u):
        for v in g.neighbors(u):
            if v not in seen:
                seen.add(v)
                tree.append(edge_key(u, v))
                visit(v)

    visit(root)
    return tree
