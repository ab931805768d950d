from .regions import (
    BoundingBox,
    HalfPlane,
    Line,
    PlacedBatch,
    PlacedShape,
    Point,
    Region,
)
from .shapes import (
    AffineShape,
    Circle,
    ConvexPolygon,
    Ellipse,
    Shape,
    SmoothedPolygon,
    Superellipse,
    affine_shape,
)
from .transforms import AffineMap, Placement, rotate, rotation_matrix

__all__ = [
    "AffineMap",
    "AffineShape",
    "BoundingBox",
    "Circle",
    "ConvexPolygon",
    "Ellipse",
    "HalfPlane",
    "Line",
    "PlacedBatch",
    "PlacedShape",
    "Placement",
    "Point",
    "Region",
    "Shape",
    "SmoothedPolygon",
    "Superellipse",
    "affine_shape",
    "rotate",
    "rotation_matrix",
]
