"""Graphs attached to coupled families and dimension-comparison reports.

The coupling digraph has one vertex per space and an edge (i, j) exactly
when block (i, j) has full column rank (rank n_j), i.e. when it embeds the
j-th space into the i-th.  The linked graph of a pair of families joins
{i, j} when the two vertices are strongly connected in either family's
digraph.  Walks in the digraph force weakly decreasing space dimensions and
weakly decreasing invariant-subspace dimensions along the walk; strongly
connected components therefore carry constant dimensions, which is what the
report helpers check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .family import CoupledFamily
from .linalg import DEFAULT_TOL, TolerancePolicy, matrix_rank, to_float

__all__ = [
    "FamilyDigraph",
    "LinkedGraph",
    "family_digraph",
    "strongly_connected_components",
    "is_strongly_connected",
    "linked_graph",
    "DimensionReport",
    "subspace_dimension_report",
    "solution_rank_report",
]


@dataclass(frozen=True)
class FamilyDigraph:
    """Directed graph on ``n`` vertices with edge set ``edges``."""

    n: int
    edges: frozenset[tuple[int, int]]

    def successors(self, v: int) -> list[int]:
        return sorted(j for (i, j) in self.edges if i == v)

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_dot(self, name: str = "D", labels: tuple[str, ...] | None = None) -> str:
        lab = labels if labels is not None else tuple(str(v) for v in range(self.n))
        lines = [f"digraph {name} {{"]
        for v in range(self.n):
            lines.append(f"  {lab[v]};")
        for i, j in self.edge_list():
            lines.append(f"  {lab[i]} -> {lab[j]};")
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class LinkedGraph:
    """Undirected graph pairing spaces linked through either digraph."""

    n: int
    edges: frozenset[tuple[int, int]]  # stored with i < j

    def neighbors(self, v: int) -> list[int]:
        out = set()
        for i, j in self.edges:
            if i == v:
                out.add(j)
            elif j == v:
                out.add(i)
        return sorted(out)

    def connected_components(self) -> list[list[int]]:
        seen: set[int] = set()
        comps = []
        for start in range(self.n):
            if start in seen:
                continue
            stack = [start]
            comp = []
            seen.add(start)
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self.neighbors(v):
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    @property
    def connected(self) -> bool:
        return self.n <= 1 or len(self.connected_components()) == 1

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_dot(self, name: str = "G", labels: tuple[str, ...] | None = None) -> str:
        lab = labels if labels is not None else tuple(str(v) for v in range(self.n))
        lines = [f"graph {name} {{"]
        for v in range(self.n):
            lines.append(f"  {lab[v]};")
        for i, j in self.edge_list():
            lines.append(f"  {lab[i]} -- {lab[j]};")
        lines.append("}")
        return "\n".join(lines)


def family_digraph(
    family: CoupledFamily, tol: TolerancePolicy = DEFAULT_TOL
) -> FamilyDigraph:
    """Digraph with (i, j) present iff block (i, j) has full column rank."""
    edges = set()
    for i in range(family.K):
        for j in range(family.K):
            b = family.blocks[i][j]
            if matrix_rank(b, tol) == family.dims[j]:
                edges.add((i, j))
    return FamilyDigraph(family.K, frozenset(edges))


def strongly_connected_components(d: FamilyDigraph) -> list[list[int]]:
    """Tarjan's algorithm; components sorted by smallest member."""
    index: dict[int, int] = {}
    lowlink: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    counter = 0
    comps: list[list[int]] = []

    adj = {v: d.successors(v) for v in range(d.n)}

    def strongconnect(v: int) -> None:
        nonlocal counter
        # iterative DFS to avoid recursion limits on long chains
        work = [(v, iter(adj[v]))]
        index[v] = lowlink[v] = counter
        counter += 1
        stack.append(v)
        on_stack.add(v)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                elif w in on_stack:
                    lowlink[node] = min(lowlink[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                comps.append(sorted(comp))

    for v in range(d.n):
        if v not in index:
            strongconnect(v)
    return sorted(comps, key=lambda c: c[0])


def is_strongly_connected(d: FamilyDigraph) -> bool:
    if d.n <= 1:
        return True
    comps = strongly_connected_components(d)
    return len(comps) == 1


def linked_graph(da: FamilyDigraph, db: FamilyDigraph) -> LinkedGraph:
    """Edge {i, j} iff i and j share a strong component of either digraph."""
    if da.n != db.n:
        raise ValueError("digraphs have different vertex counts")
    edges: set[tuple[int, int]] = set()
    for d in (da, db):
        for comp in strongly_connected_components(d):
            for a in comp:
                for b in comp:
                    if a < b:
                        edges.add((a, b))
    return LinkedGraph(da.n, frozenset(edges))


@dataclass(frozen=True)
class DimensionReport:
    """Rows of per-space quantities plus the comparisons they must satisfy."""

    kind: str
    rows: tuple[dict, ...]
    violations: tuple[dict, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return len(self.violations) == 0

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "rows": [dict(r) for r in self.rows],
            "violations": [dict(v) for v in self.violations],
            "ok": self.ok,
        }


def subspace_dimension_report(
    family: CoupledFamily,
    bases: tuple[np.ndarray, ...],
    tol: TolerancePolicy = DEFAULT_TOL,
) -> DimensionReport:
    """Check subspace dimensions are constant on strong components and
    weakly decreasing along edges of the coupling digraph.

    ``bases[i]`` holds basis columns of the i-th subspace.
    """
    d = family_digraph(family, tol)
    dims_sub = [matrix_rank(b, tol) for b in bases]
    rows = tuple(
        {"space": i, "dim": family.dims[i], "subspace_dim": dims_sub[i]}
        for i in range(family.K)
    )
    violations = []
    for (i, j) in d.edge_list():
        # edge (i, j): the j-th space embeds into the i-th
        if family.dims[j] > family.dims[i]:
            violations.append(
                {"check": "space-dim-monotone", "edge": [i, j],
                 "detail": f"n_{j}={family.dims[j]} > n_{i}={family.dims[i]}"}
            )
        if dims_sub[j] > dims_sub[i]:
            violations.append(
                {"check": "subspace-dim-monotone", "edge": [i, j],
                 "detail": f"d_{j}={dims_sub[j]} > d_{i}={dims_sub[i]}"}
            )
    for comp in strongly_connected_components(d):
        if len({dims_sub[i] for i in comp}) > 1:
            violations.append(
                {"check": "scc-subspace-dim-constant", "component": comp,
                 "detail": f"dims {[dims_sub[i] for i in comp]}"}
            )
        if len({family.dims[i] for i in comp}) > 1:
            violations.append(
                {"check": "scc-space-dim-constant", "component": comp,
                 "detail": f"dims {[family.dims[i] for i in comp]}"}
            )
    return DimensionReport("subspace-dimensions", rows, tuple(violations))


def solution_rank_report(
    a: CoupledFamily,
    b: CoupledFamily,
    xblocks: tuple[np.ndarray, ...],
    tol: TolerancePolicy = DEFAULT_TOL,
) -> DimensionReport:
    """Check rank/nullity propagation of solution blocks across the graphs.

    Solution blocks must have equal rank within each strong component of the
    digraph of ``a`` (range propagation), equal nullity and rank within each
    strong component of the digraph of ``b`` (kernel propagation), and equal
    rank across every connected component of the linked graph.
    """
    da = family_digraph(a, tol)
    db = family_digraph(b, tol)
    g = linked_graph(da, db)
    ranks = [matrix_rank(to_float(x), tol) for x in xblocks]
    nullities = [int(xblocks[i].shape[1]) - ranks[i] for i in range(a.K)]
    rows = tuple(
        {
            "space": i,
            "rows": int(xblocks[i].shape[0]),
            "cols": int(xblocks[i].shape[1]),
            "rank": ranks[i],
            "nullity": nullities[i],
        }
        for i in range(a.K)
    )
    violations = []
    for comp in strongly_connected_components(da):
        if len({ranks[i] for i in comp}) > 1:
            violations.append(
                {"check": "scc-a-rank-constant", "component": comp,
                 "detail": f"ranks {[ranks[i] for i in comp]}"}
            )
    for comp in strongly_connected_components(db):
        if len({nullities[i] for i in comp}) > 1:
            violations.append(
                {"check": "scc-b-nullity-constant", "component": comp,
                 "detail": f"nullities {[nullities[i] for i in comp]}"}
            )
        if len({ranks[i] for i in comp}) > 1:
            violations.append(
                {"check": "scc-b-rank-constant", "component": comp,
                 "detail": f"ranks {[ranks[i] for i in comp]}"}
            )
    for comp in g.connected_components():
        if len({ranks[i] for i in comp}) > 1:
            violations.append(
                {"check": "linked-rank-constant", "component": comp,
                 "detail": f"ranks {[ranks[i] for i in comp]}"}
            )
    return DimensionReport("solution-ranks", rows, tuple(violations))
