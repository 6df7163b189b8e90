"""Application adapters: set cover, s-t cuts, and group Steiner on trees.

Set cover streams one unit row per element over the sets containing it.
Group Steiner relaxes to a boxed covering LP over tree edges whose rows are
violated root-to-group cuts, produced lazily by a max-flow separation oracle:
cap each tree edge (directed away from the root) by its current fractional
value, wire every group vertex to a super sink with effectively infinite
capacity, and return the min cut when its value is below one.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .covering_lp import current_solution
from .covering_lp_box import new_lp_box_solver, process_row_box
from .errors import (Infeasible, MalformedDocument, UncoverableElement)
from .instances import (AdviceVector, CoveringLpInstance, SolverParams,
                        SparseRow, make_lp_instance)


# ---------------------------------------------------------------- set cover

@dataclass
class SetSystem:
    """Weighted sets over a ground universe; element i names the sets
    containing it."""
    costs: np.ndarray
    membership: list[list[int]]   # element -> indices of covering sets

    def __post_init__(self):
        self.costs = np.asarray(self.costs, dtype=float)
        n = self.costs.size
        for i, group in enumerate(self.membership):
            if len(group) == 0:
                raise UncoverableElement(f"element {i} belongs to no set")
            if len(set(group)) != len(group):
                raise MalformedDocument(f"element {i} repeats a set")
            for j in group:
                if not 0 <= j < n:
                    raise MalformedDocument(
                        f"element {i} references set {j} out of range")

    @property
    def max_frequency(self) -> int:
        return max(len(g) for g in self.membership)


def set_cover_stream(system: SetSystem) -> list[SparseRow]:
    """One unit covering row per element."""
    return [[(j, 1.0) for j in group] for group in system.membership]


def set_cover_instance(system: SetSystem) -> CoveringLpInstance:
    return make_lp_instance(system.costs.size, system.costs,
                            set_cover_stream(system), boxed=True)


def solve_set_cover(system: SetSystem, advice: AdviceVector | None = None,
                    params: SolverParams | None = None):
    """Stream the elements through the boxed solver; returns (x, state).

    The row sparsity never exceeds the element frequency, so the guarantee
    scales with log(max_frequency) when the suggestion is distrusted.
    """
    st = new_lp_box_solver(system.costs.size, system.costs, advice=advice,
                           params=params)
    for row in set_cover_stream(system):
        process_row_box(st, row)
    return current_solution(st), st


# ------------------------------------------------------------ max flow / cut

@dataclass
class FlowNetwork:
    """Directed network with float capacities on arcs."""
    num_nodes: int
    arcs: list[tuple[int, int, float]] = field(default_factory=list)

    def add_arc(self, u: int, v: int, cap: float) -> int:
        if not (0 <= u < self.num_nodes and 0 <= v < self.num_nodes):
            raise MalformedDocument(f"arc ({u}, {v}) out of range")
        if cap < 0 or not np.isfinite(cap):
            raise MalformedDocument(f"arc ({u}, {v}) has capacity {cap}")
        self.arcs.append((u, v, float(cap)))
        return len(self.arcs) - 1


def max_flow(net: FlowNetwork, s: int, t: int):
    """Blocking-flow max flow (Dinic); returns (value, cut_arc_indices).

    The cut is the set of original arcs leaving the residual-reachable side
    of s; its indices refer to net.arcs order. Capacities are floats, so
    residuals below a scale-aware epsilon count as saturated.
    """
    if s == t:
        raise MalformedDocument("source equals sink")
    n = net.num_nodes
    heads: list[int] = []
    caps: list[float] = []
    adj: list[list[int]] = [[] for _ in range(n)]
    for (u, v, cap) in net.arcs:
        adj[u].append(len(heads))
        heads.append(v)
        caps.append(cap)
        adj[v].append(len(heads))
        heads.append(u)
        caps.append(0.0)
    big = max((cap for (_, _, cap) in net.arcs), default=0.0)
    eps = 1e-12 * max(1.0, big)

    def bfs_levels():
        level = [-1] * n
        level[s] = 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for e in adj[u]:
                v = heads[e]
                if caps[e] > eps and level[v] < 0:
                    level[v] = level[u] + 1
                    dq.append(v)
        return level if level[t] >= 0 else None

    def dfs_push(u, limit, level, iters):
        if u == t:
            return limit
        while iters[u] < len(adj[u]):
            e = adj[u][iters[u]]
            v = heads[e]
            if caps[e] > eps and level[v] == level[u] + 1:
                pushed = dfs_push(v, min(limit, caps[e]), level, iters)
                if pushed > eps:
                    caps[e] -= pushed
                    caps[e ^ 1] += pushed
                    return pushed
            iters[u] += 1
        return 0.0

    value = 0.0
    while True:
        level = bfs_levels()
        if level is None:
            break
        iters = [0] * n
        while True:
            pushed = dfs_push(s, np.inf, level, iters)
            if pushed <= eps:
                break
            value += pushed

    # Source side of the cut under residual reachability.
    reach = [False] * n
    reach[s] = True
    dq = deque([s])
    while dq:
        u = dq.popleft()
        for e in adj[u]:
            v = heads[e]
            if caps[e] > eps and not reach[v]:
                reach[v] = True
                dq.append(v)
    # Drop boundary arcs whose head has no directed path to t at all
    # (zero-capacity dead ends); those arcs separate nothing, and keeping
    # them would hand the covering solver constraints over unrelated
    # coordinates. Arc existence, not current capacity, decides this, so
    # a saturated corridor still counts as a path.
    coreach = [False] * n
    coreach[t] = True
    rev: list[list[int]] = [[] for _ in range(n)]
    for (u, v, _) in net.arcs:
        rev[v].append(u)
    dq = deque([t])
    while dq:
        u = dq.popleft()
        for w in rev[u]:
            if not coreach[w]:
                coreach[w] = True
                dq.append(w)
    cut = [k for k, (u, v, _) in enumerate(net.arcs)
           if reach[u] and not reach[v] and coreach[v]]
    return value, cut


# ------------------------------------------------------- group Steiner tree

@dataclass
class RootedTree:
    """A tree rooted at `root` with positive edge costs; edges are stored
    directed away from the root in input order."""
    root: int
    num_nodes: int
    edges: list[tuple[int, int, float]]   # (parent, child, cost)

    @staticmethod
    def from_edge_list(num_nodes: int, root: int,
                       edges: list[tuple[int, int, float]]) -> "RootedTree":
        if not 0 <= root < num_nodes:
            raise MalformedDocument(f"root {root} out of range")
        if len(edges) != num_nodes - 1:
            raise MalformedDocument(
                f"{len(edges)} edges cannot form a spanning tree on "
                f"{num_nodes} nodes")
        adj: list[list[tuple[int, int]]] = [[] for _ in range(num_nodes)]
        for k, (u, v, cost) in enumerate(edges):
            if not (0 <= u < num_nodes and 0 <= v < num_nodes) or u == v:
                raise MalformedDocument(f"edge {k} = ({u}, {v}) is invalid")
            if cost <= 0 or not np.isfinite(cost):
                raise MalformedDocument(f"edge {k} has cost {cost}")
            adj[u].append((v, k))
            adj[v].append((u, k))
        parent = [-1] * num_nodes
        seen = [False] * num_nodes
        seen[root] = True
        order = deque([root])
        oriented: list[tuple[int, int, float] | None] = [None] * len(edges)
        while order:
            u = order.popleft()
            for (v, k) in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    parent[v] = u
                    oriented[k] = (u, v, edges[k][2])
                    order.append(v)
        if not all(seen):
            raise MalformedDocument("edge list is not connected")
        if any(o is None for o in oriented):
            raise MalformedDocument("edge list contains a cycle")
        return RootedTree(root=root, num_nodes=num_nodes, edges=oriented)


def gst_oracle(tree: RootedTree, group: list[int], x_edges,
               tol: float = 1e-7) -> SparseRow | None:
    """Violated root-to-group cut under edge values x, or None.

    Caps each tree edge at its value, connects the group to a super sink
    with capacity above any possible cut, and runs max flow from the root.
    A flow value below 1 - tol yields the min cut restricted to tree edges
    as a unit covering row.
    """
    if len(group) == 0:
        raise MalformedDocument("group is empty")
    for v in group:
        if not 0 <= v < tree.num_nodes:
            raise MalformedDocument(f"group vertex {v} out of range")
    x = np.asarray(x_edges, dtype=float)
    if tree.root in group:
        return None
    net = FlowNetwork(num_nodes=tree.num_nodes + 1)
    sink = tree.num_nodes
    big = float(np.sum(np.minimum(x, 1.0))) + 1.0
    tree_arc_of_edge = []
    for k, (u, v, _) in enumerate(tree.edges):
        tree_arc_of_edge.append(net.add_arc(u, v, min(float(x[k]), 1.0)))
    for v in set(group):
        net.add_arc(v, sink, big)
    value, cut = max_flow(net, tree.root, sink)
    if value >= 1.0 - tol:
        return None
    arc_to_edge = {a: k for k, a in enumerate(tree_arc_of_edge)}
    row = [(arc_to_edge[a], 1.0) for a in cut if a in arc_to_edge]
    if not row:
        raise Infeasible("violated group admits no tree cut")
    return row


def solve_gst_online(tree: RootedTree, groups: list[list[int]],
                     advice: AdviceVector | None = None,
                     params: SolverParams | None = None):
    """Online fractional group Steiner on a tree; returns (x, state).

    Groups arrive one at a time; each repeatedly contributes its currently
    most violated root cut until the flow to the group reaches 1. On a tree
    the all-ones labeling cuts every group, so the boxed LP never turns
    infeasible and rows never exceed the tree size.
    """
    n = len(tree.edges)
    costs = np.array([cost for (_, _, cost) in tree.edges])
    st = new_lp_box_solver(n, costs, advice=advice, params=params)
    for group in groups:
        while True:
            row = gst_oracle(tree, group, current_solution(st))
            if row is None:
                break
            process_row_box(st, row)
    return current_solution(st), st


def parse_tree_doc(doc: dict) -> tuple[RootedTree, list[list[int]]]:
    """JSON layout: {"nodes": N, "root": r, "edges": [[u, v, cost], ...],
    "groups": [[v, ...], ...]}."""
    try:
        num_nodes = int(doc["nodes"])
        root = int(doc["root"])
        edges = [(int(u), int(v), float(cst)) for u, v, cst in doc["edges"]]
        groups = [[int(v) for v in g] for g in doc["groups"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"bad tree document: {exc}") from None
    return RootedTree.from_edge_list(num_nodes, root, edges), groups
