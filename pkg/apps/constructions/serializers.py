"""
Construction files:

    gmn shape=<shape spec> family=<tag> m=<i> n=<i> k=<i> eps=<f> delta=<f>
    <vertex-id> @ scale=<f> rot=<f> dx=<f> dy=<f> [reflect]
    <vertex-id> halfplane n=(nx,ny) d=<f>
    ...
    edge <vertex-id> <vertex-id>
    ...

Graph files hold ``vertex <id>`` and ``edge <a> <b>`` lines only.
"""

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from apps.constructions.models import (
    ConstructionOutput,
    ConstructionParams,
    Graph,
    InteriorRealization,
    VertexId,
)
from apps.geometry.choices import FamilyTag
from apps.geometry.grammar import format_region, parse_float, parse_region, parse_shape, tokenize

HEADER_KEYS = {"m", "n", "k", "eps", "delta"}


def _syntax(message, **params):
    return ValidationError(message, code="syntax", params=params)


def _edge_lines(graph):
    return [f"edge {a} {b}" for a, b in graph.sorted_edges()]


def _parse_edge(line):
    words = line.split()
    if len(words) != 3 or words[0] != "edge":
        raise _syntax(_("Expected 'edge <a> <b>', got %(line)r."), line=line)
    return VertexId.parse(words[1]), VertexId.parse(words[2])


def dump_graph(graph: Graph) -> str:
    lines = [f"vertex {v}" for v in graph.vertices] + _edge_lines(graph)
    return "\n".join(lines) + "\n"


def load_graph(text) -> Graph:
    vertices, edges = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("vertex "):
            vertices.append(VertexId.parse(line.removeprefix("vertex ")))
        else:
            edges.append(_parse_edge(line))
    return Graph(tuple(vertices), frozenset(edges), note="file")


def dump_regions(regions) -> list:
    return [f"{v} {format_region(r, with_shape=False)}" for v, r in regions.items()]


def parse_region_line(line, shape):
    vertex, _sep, rest = line.partition(" ")
    return VertexId.parse(vertex), parse_region(rest, shape)


def dump_construction(out: ConstructionOutput) -> str:
    params = out.params
    lines = [f"gmn shape={out.shape.spec()} {params.spec()}"]
    lines += dump_regions(out.realization.regions)
    lines += _edge_lines(out.graph)
    return "\n".join(lines) + "\n"


def parse_header(line):
    if not line.startswith("gmn shape="):
        raise _syntax(_("Expected a 'gmn shape=...' header, got %(line)r."), line=line)
    spec, sep, rest = line.removeprefix("gmn shape=").partition(" family=")
    if not sep:
        raise _syntax(_("The header has no family."))
    tag, _sep, rest = rest.partition(" ")
    if tag not in FamilyTag.values:
        raise _syntax(_("Unknown family %(tag)r."), tag=tag)
    words, values = tokenize(rest)
    if words or set(values) != HEADER_KEYS:
        raise _syntax(_("The header needs exactly m, n, k, eps and delta."))
    params = ConstructionParams(
        m=int(parse_float(values["m"], "m")),
        n=int(parse_float(values["n"], "n")),
        family=FamilyTag(tag),
        k=int(parse_float(values["k"], "k")),
        epsilon=parse_float(values["eps"], "eps"),
        delta=parse_float(values["delta"], "delta"),
    )
    return parse_shape(spec), params


def load_construction(text) -> ConstructionOutput:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise _syntax(_("Construction file is empty."))
    shape, params = parse_header(lines[0])
    regions, edges = {}, []
    for line in lines[1:]:
        if line.startswith("edge "):
            edges.append(_parse_edge(line))
            continue
        vertex, region = parse_region_line(line, shape)
        if vertex in regions:
            raise _syntax(_("Vertex %(vertex)s is listed twice."), vertex=str(vertex))
        regions[vertex] = region
    realization = InteriorRealization(shape, params.family, regions)
    graph = Graph(realization.vertices, frozenset(edges), note="file")
    return ConstructionOutput(graph, realization, params, shape)
