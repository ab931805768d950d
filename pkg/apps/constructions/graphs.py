"""The complete bipartite gadget ``K_{2,n}`` and the row gadget ``L_n``."""

from apps.chains.validators import validate_count
from apps.constructions.models import Graph, Role, VertexId

V = VertexId.of


def build_K2n(n: int) -> Graph:
    validate_count(n, "n")
    sides = [V(Role.U, 1), V(Role.U, 2)]
    middle = [V(Role.V, i) for i in range(1, n + 1)]
    edges = {(u, v) for u in sides for v in middle}
    return Graph(tuple(sides + middle), frozenset(edges), note=f"K_2,{n}")


def build_Ln(n: int) -> Graph:
    """
    The row gadget: two copies of ``K_{2,n}`` per ``v(j)`` glued through
    ``w(i,j,k)``, plus ``uhat(1)`` and ``uhat(2)`` adjacent to everything
    except ``u(2)`` and ``u(1)`` respectively.
    """
    validate_count(n, "n")
    u = {i: V(Role.U, i) for i in (1, 2)}
    hat = {i: V(Role.UHAT, i) for i in (1, 2)}
    vs = [V(Role.V, j) for j in range(1, n + 1)]
    middle = [
        V(Role.W, i, j, k)
        for i in (1, 2)
        for j in range(1, n + 1)
        for k in range(1, n + 1)
    ]
    vertices = [*u.values(), *hat.values(), *vs, *middle]
    edges = set()
    for w in middle:
        i, j, _k = w.indices
        edges.add((u[i], w))
        edges.add((w, vs[j - 1]))
    for i, other in ((1, 2), (2, 1)):
        for vertex in vertices:
            if vertex not in (hat[i], u[other]):
                edges.add((hat[i], vertex))
    return Graph(tuple(vertices), frozenset(edges), note=f"L_{n}")
