import re
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx
from django.core.exceptions import ValidationError
from django.db import models
from django.utils.translation import gettext_lazy as _

from apps.core.utils import fmt_float
from apps.geometry.choices import FamilyTag
from apps.geometry.models import PlacedShape, Shape
from apps.geometry.validators import FamilyPlacementValidator

VERTEX_PATTERN = re.compile(r"^([a-z]+)(?:\((-?\d+(?:,-?\d+)*)\))?$")


class Role(models.TextChoices):
    V = "v", _("Grid cell disk")
    U = "u", _("Row half-plane")
    UBAR = "ubar", _("Column half-plane")
    UHAT = "uhat", _("Bridging vertex")
    Z = "z", _("Row chain disk")
    ZBAR = "zbar", _("Column chain disk")
    W = "w", _("Shape disk")
    X = "x", _("Row glue disk")
    XBAR = "xbar", _("Column glue disk")


ROLE_ORDER = {role: index for index, role in enumerate(Role.values)}


@dataclass(frozen=True)
class VertexId:
    """
    A role letter with integer indices, written ``v(1,2)``, ``u(1)`` or ``w``.

    The same role letter may appear with different arities: ``w`` is the
    shape disk of the grid construction while ``w(i,j,k)`` are the middle
    vertices of a row gadget.
    """

    role: str
    indices: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "role", Role(self.role).value)
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    @classmethod
    def of(cls, role, *indices):
        return cls(role, indices)

    @classmethod
    def parse(cls, text):
        match = VERTEX_PATTERN.match(text.strip())
        if not match or match.group(1) not in Role.values:
            raise ValidationError(
                _("%(text)r is not a vertex id."),
                code="syntax",
                params={"text": text},
            )
        role, indices = match.groups()
        return cls(role, tuple(int(i) for i in indices.split(",")) if indices else ())

    def sort_key(self):
        return (ROLE_ORDER[self.role], len(self.indices), self.indices)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        if not self.indices:
            return self.role
        return f"{self.role}({','.join(str(i) for i in self.indices)})"


def edge_key(a: VertexId, b: VertexId):
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Graph:
    vertices: tuple
    edges: frozenset
    note: str = field(default="", compare=False)

    def __post_init__(self):
        vertices = tuple(sorted(set(self.vertices), key=VertexId.sort_key))
        edges = frozenset(edge_key(a, b) for a, b in self.edges)
        listed = set(vertices)
        for a, b in edges:
            if a == b:
                raise ValidationError(
                    _("Self-loop at %(vertex)s."),
                    code="self_loop",
                    params={"vertex": str(a)},
                )
            if a not in listed or b not in listed:
                raise ValidationError(
                    _("Edge %(a)s-%(b)s uses an unlisted vertex."),
                    code="unknown_vertex",
                    params={"a": str(a), "b": str(b)},
                )
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)

    @cached_property
    def adjacency(self) -> dict:
        neighbours = {v: set() for v in self.vertices}
        for a, b in self.edges:
            neighbours[a].add(b)
            neighbours[b].add(a)
        return neighbours

    def has_edge(self, a, b):
        return edge_key(a, b) in self.edges

    def degree(self, vertex):
        return len(self.adjacency[vertex])

    def sorted_edges(self):
        return sorted(self.edges, key=lambda e: (e[0].sort_key(), e[1].sort_key()))

    def induced(self, vertices, note=""):
        keep = set(vertices)
        return Graph(
            tuple(keep),
            frozenset(e for e in self.edges if e[0] in keep and e[1] in keep),
            note or self.note,
        )

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.sorted_edges())
        return graph

    def __len__(self):
        return len(self.vertices)


def validate_family_regions(shape, family, regions):
    validator = FamilyPlacementValidator(family)
    for vertex, region in regions.items():
        if not region.bounded:
            continue
        if region.shape != shape:
            raise ValidationError(
                _("Vertex %(vertex)s is a copy of %(spec)s, not of the base shape."),
                code="foreign_shape",
                params={"vertex": str(vertex), "spec": region.shape.spec()},
            )
        validator(region.placement)


@dataclass(frozen=True)
class InteriorRealization:
    """
    Copies of one base shape and half-planes; edges are the pairs whose
    interiors meet.
    """

    shape: Shape
    family: FamilyTag
    regions: dict

    def __post_init__(self):
        object.__setattr__(self, "family", FamilyTag(self.family))
        regions = {v: self.regions[v] for v in sorted(self.regions, key=VertexId.sort_key)}
        object.__setattr__(self, "regions", regions)
        validate_family_regions(self.shape, self.family, regions)

    @property
    def vertices(self):
        return tuple(self.regions)

    def __getitem__(self, vertex):
        return self.regions[vertex]

    def __len__(self):
        return len(self.regions)

    def restricted(self, vertices):
        keep = set(vertices)
        return InteriorRealization(
            self.shape, self.family, {v: r for v, r in self.regions.items() if v in keep}
        )

    def relabeled(self, mapping):
        """Regions renamed by ``mapping`` (new id -> old id)."""
        return InteriorRealization(
            self.shape, self.family, {new: self.regions[old] for new, old in mapping.items()}
        )


@dataclass(frozen=True)
class ConstructionParams:
    m: int
    n: int
    family: FamilyTag
    k: int
    epsilon: float
    delta: float

    def spec(self):
        return (
            f"family={FamilyTag(self.family).value} m={self.m} n={self.n} k={self.k}"
            f" eps={fmt_float(self.epsilon)} delta={fmt_float(self.delta)}"
        )


@dataclass(frozen=True)
class ConstructionOutput:
    """The grid gadget with its explicit interior-realization."""

    graph: Graph
    realization: InteriorRealization
    params: ConstructionParams
    shape: Shape

    @property
    def m(self):
        return self.params.m

    @property
    def n(self):
        return self.params.n

    @property
    def k(self):
        return self.params.k

    def region(self, role, *indices) -> PlacedShape:
        return self.realization[VertexId(role, indices)]
