"""
Checks of the five structural properties of the grid construction:

1. every row and column carries an induced row gadget ``L_n``;
2. every row (column) of cells is connected to its strict chain, which is a path;
3. chain ends meet the outer half-planes;
4. the shape disk meets every chain and forms ``K_{2,n}`` with the outer half-planes;
5. cells inside the shape are adjacent to it, adjacent cells meet it.
"""

from dataclasses import dataclass, field

import networkx as nx

from apps.chains.models import Axis
from apps.constructions.graphs import build_Ln
from apps.constructions.models import Graph, Role, VertexId
from apps.grids.services import cell_relations

V = VertexId.of
PROPERTIES = (1, 2, 3, 4, 5)


@dataclass
class PropertyReport:
    failures: dict = field(default_factory=lambda: {p: [] for p in PROPERTIES})

    def fail(self, prop, message):
        self.failures[prop].append(message)

    def holds(self, prop) -> bool:
        return not self.failures[prop]

    @property
    def passed(self) -> bool:
        return all(self.holds(p) for p in PROPERTIES)


def _independent_pick(graph, candidates, count, taken=()):
    """
    Greedy pairwise non-adjacent choice of ``count`` candidates, fewest
    neighbours first. Chain disks crossing a glue row also qualify as
    middle vertices but block every glue disk they overlap.
    """
    adjacency = graph.adjacency
    chosen, blocked = [], set(taken)
    order = sorted(candidates, key=lambda v: (len(adjacency[v]), v.sort_key()))
    for vertex in order:
        if adjacency[vertex] & blocked or vertex in blocked:
            continue
        chosen.append(vertex)
        blocked.add(vertex)
        if len(chosen) == count:
            break
    return chosen


def find_induced_Ln(graph: Graph, u1, u2, uhat1, uhat2, vs):
    """
    Look for an induced ``L_n`` with the given roles; the middle vertices
    are picked among common neighbours.

    Returns ``(mapping, failures)`` with ``mapping`` from ``L_n`` ids to
    vertices of ``graph``, or ``None`` when no copy was found.
    """
    n = len(vs)
    core = [u1, u2, uhat1, uhat2, *vs]
    missing = [str(v) for v in core if v not in graph.adjacency]
    if missing:
        return None, [f"missing vertices {', '.join(missing)}"]
    adjacency = graph.adjacency
    core_set = set(core)
    mapping = {
        V(Role.U, 1): u1,
        V(Role.U, 2): u2,
        V(Role.UHAT, 1): uhat1,
        V(Role.UHAT, 2): uhat2,
    }
    mapping.update({V(Role.V, j): v for j, v in enumerate(vs, 1)})
    failures, taken = [], set()
    for i, side in ((1, u1), (2, u2)):
        for j, v in enumerate(vs, 1):
            wanted = {side, v, uhat1, uhat2}
            candidates = [
                c
                for c in (adjacency[side] & adjacency[v]) - core_set
                if adjacency[c] & core_set == wanted
            ]
            picked = _independent_pick(graph, candidates, n, taken)
            if len(picked) < n:
                failures.append(
                    f"only {len(picked)} of {n} middle vertices for {side} and {v}"
                )
            taken.update(picked)
            mapping.update({V(Role.W, i, j, k): w for k, w in enumerate(picked, 1)})
    if failures:
        return None, failures
    inverse = {old: new for new, old in mapping.items()}
    found = graph.induced(mapping.values())
    relabeled = {(inverse[a], inverse[b]) for a, b in found.edges}
    expected = build_Ln(n)
    if Graph(expected.vertices, frozenset(relabeled)) != expected:
        return None, [f"subgraph on {u1}, {u2} is not an induced L_{n}"]
    return mapping, []


def row_roles(axis, index, n):
    """The vertices playing ``u1, u2, uhat1, uhat2, v_1..v_n`` for a row or column."""
    if axis == Axis.HORIZONTAL:
        j = index
        return (
            V(Role.U, 1, j),
            V(Role.U, 2, j),
            V(Role.U, 1, j + 1),
            V(Role.U, 2, j - 1),
            [V(Role.V, i, j) for i in range(1, n + 1)],
        )
    i = index
    return (
        V(Role.UBAR, i, 1),
        V(Role.UBAR, i, 2),
        V(Role.UBAR, i + 1, 1),
        V(Role.UBAR, i - 1, 2),
        [V(Role.V, i, j) for j in range(1, n + 1)],
    )


def find_row_gadget(graph, axis, index, n):
    u1, u2, uhat1, uhat2, vs = row_roles(axis, index, n)
    return find_induced_Ln(graph, u1, u2, uhat1, uhat2, vs)


def _row_gadgets(report, graph, m, n):
    for axis in Axis.CHOICES:
        for index in range(1, m + 1):
            mapping, failures = find_row_gadget(graph, axis, index, n)
            if mapping is None:
                for failure in failures:
                    report.fail(1, f"{axis} {index}: {failure}")


def _chains(report, graph, m, k):
    nx_graph = graph.to_networkx()
    for axis, role in ((Axis.HORIZONTAL, Role.Z), (Axis.VERTICAL, Role.ZBAR)):
        for index in range(1, m + 1):
            if role == Role.Z:
                path = [V(role, i, index) for i in range(1, k + 1)]
                cells = [V(Role.V, i, index) for i in range(1, m + 1)]
            else:
                path = [V(role, index, j) for j in range(1, k + 1)]
                cells = [V(Role.V, index, j) for j in range(1, m + 1)]
            members = [v for v in path + cells if v in graph.adjacency]
            if len(members) < len(path) + len(cells):
                report.fail(2, f"{axis} {index}: chain or cells missing")
                continue
            if not nx.is_connected(nx_graph.subgraph(members)):
                report.fail(2, f"{axis} {index}: cells and chain are not connected")
            for a, b in zip(path, path[1:]):
                if not graph.has_edge(a, b):
                    report.fail(2, f"{axis} {index}: no edge {a}-{b}")


def _chain_ends(report, graph, m, k):
    checks = []
    for j in range(1, m + 1):
        checks.append((V(Role.Z, 1, j), V(Role.UBAR, 1, 1)))
        checks.append((V(Role.Z, k, j), V(Role.UBAR, m, 2)))
    for i in range(1, m + 1):
        checks.append((V(Role.ZBAR, i, 1), V(Role.U, 1, 1)))
        checks.append((V(Role.ZBAR, i, k), V(Role.U, 2, m)))
    for a, b in checks:
        if a not in graph.adjacency or not graph.has_edge(a, b):
            report.fail(3, f"no edge {a}-{b}")


def _shape_disk(report, graph, m, n, k):
    w = V(Role.W)
    if w not in graph.adjacency:
        report.fail(4, "missing vertex w")
        return
    neighbours = graph.adjacency[w]
    for index in range(1, m + 1):
        row = {V(Role.Z, i, index) for i in range(1, k + 1)}
        column = {V(Role.ZBAR, index, j) for j in range(1, k + 1)}
        if not row & neighbours:
            report.fail(4, f"w misses every disk of row chain {index}")
        if not column & neighbours:
            report.fail(4, f"w misses every disk of column chain {index}")
    for side in (V(Role.U, 1, 1), V(Role.U, 2, m), V(Role.UBAR, 1, 1), V(Role.UBAR, m, 2)):
        if side not in graph.adjacency:
            report.fail(4, f"missing vertex {side}")
            continue
        if graph.has_edge(side, w):
            report.fail(4, f"{side} and w are adjacent")
        common = graph.adjacency[side] & neighbours
        picked = _independent_pick(graph, common, n)
        if len(picked) < n:
            report.fail(4, f"{side} and w share only {len(picked)} independent neighbours")


def _cells(report, graph, shape, m):
    inside, meets = cell_relations(shape, m)
    w = V(Role.W)
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            v = V(Role.V, i, j)
            edge = v in graph.adjacency and graph.has_edge(v, w)
            if inside[i - 1, j - 1] and not edge:
                report.fail(5, f"cell ({i},{j}) lies in the shape but {v} misses w")
            if edge and not meets[i - 1, j - 1]:
                report.fail(5, f"{v} meets w although cell ({i},{j}) misses the shape")


def check_properties(out) -> PropertyReport:
    """All five properties of a construction, with failures listed per property."""
    report = PropertyReport()
    graph, m, n, k = out.graph, out.m, out.n, out.k
    _row_gadgets(report, graph, m, n)
    _chains(report, graph, m, k)
    _chain_ends(report, graph, m, k)
    _shape_disk(report, graph, m, n, k)
    _cells(report, graph, out.shape, m)
    return report
