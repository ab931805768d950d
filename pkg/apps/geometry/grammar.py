"""
Text grammar for shapes, placements and regions.

    circle r=<f>
    ellipse a=<f> b=<f>
    superellipse p=<f>
    smoothpoly r=<f> pts=(x1,y1;x2,y2;...)
    polygon pts=(x1,y1;...)
    <shape> affine=(a,b,c,d,tx,ty)
    @ scale=<f> rot=<f> dx=<f> dy=<f> [reflect]
    halfplane n=(nx,ny) d=<f>

Printing uses 17 significant digits so parse(print(x)) == x bit for bit.
"""

import re

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from apps.geometry.choices import ShapeKind
from apps.geometry.models import (
    Circle,
    ConvexPolygon,
    Ellipse,
    HalfPlane,
    PlacedShape,
    Placement,
    SmoothedPolygon,
    Superellipse,
    affine_shape,
)

TOKEN = re.compile(r"(\w+)=(\([^)]*\)|\S+)|(\S+)")

SHAPE_KEYS = {
    ShapeKind.CIRCLE: {"r"},
    ShapeKind.ELLIPSE: {"a", "b"},
    ShapeKind.SUPERELLIPSE: {"p"},
    ShapeKind.SMOOTHED_POLYGON: {"r", "pts"},
    ShapeKind.POLYGON: {"pts"},
}
PLACEMENT_KEYS = {"scale", "rot", "dx", "dy"}


def _syntax(message, **params):
    return ValidationError(message, code="syntax", params=params)


def tokenize(text):
    """Split ``text`` into ``(keywords, {key: value})``."""
    words, values = [], {}
    for match in TOKEN.finditer(text.strip()):
        key, value, word = match.groups()
        if word is not None:
            words.append(word)
        elif key in values:
            raise _syntax(_("Duplicate key %(key)s."), key=key)
        else:
            values[key] = value
    return words, values


def parse_float(text, name="value"):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise _syntax(
            _("%(name)s: %(text)s is not a number."), name=name, text=text
        ) from None


def parse_vector(text, name="vector", size=None):
    if not (text.startswith("(") and text.endswith(")")):
        raise _syntax(_("%(name)s must be parenthesized."), name=name)
    parts = [p for p in text[1:-1].split(",") if p.strip()]
    values = tuple(parse_float(p, name) for p in parts)
    if size is not None and len(values) != size:
        raise _syntax(
            _("%(name)s needs %(size)d components."), name=name, size=size
        )
    return values


def parse_points(text, name="pts"):
    if not (text.startswith("(") and text.endswith(")")):
        raise _syntax(_("%(name)s must be parenthesized."), name=name)
    return tuple(
        parse_vector(f"({pair})", name, size=2)
        for pair in text[1:-1].split(";")
        if pair.strip()
    )


def _require(values, allowed, required, what):
    unknown = set(values) - allowed
    if unknown:
        raise _syntax(
            _("Unknown %(what)s keys: %(keys)s."),
            what=what,
            keys=", ".join(sorted(unknown)),
        )
    missing = required - set(values)
    if missing:
        raise _syntax(
            _("Missing %(what)s keys: %(keys)s."),
            what=what,
            keys=", ".join(sorted(missing)),
        )


def parse_shape(text):
    words, values = tokenize(text)
    if len(words) != 1:
        raise _syntax(_("Expected a single shape kind in %(text)r."), text=text)
    try:
        kind = ShapeKind(words[0])
    except ValueError:
        raise _syntax(_("Unknown shape kind %(kind)s."), kind=words[0]) from None
    if kind == ShapeKind.AFFINE:
        raise _syntax(_("Affine images are written as a suffix."))
    affine = values.pop("affine", None)
    _require(values, SHAPE_KEYS[kind], SHAPE_KEYS[kind], kind.value)
    if kind == ShapeKind.CIRCLE:
        shape = Circle(parse_float(values["r"], "r"))
    elif kind == ShapeKind.ELLIPSE:
        shape = Ellipse(parse_float(values["a"], "a"), parse_float(values["b"], "b"))
    elif kind == ShapeKind.SUPERELLIPSE:
        shape = Superellipse(parse_float(values["p"], "p"))
    elif kind == ShapeKind.SMOOTHED_POLYGON:
        shape = SmoothedPolygon(
            parse_float(values["r"], "r"), parse_points(values["pts"])
        )
    else:
        shape = ConvexPolygon(parse_points(values["pts"]))
    if affine is not None:
        a, b, c, d, tx, ty = parse_vector(affine, "affine", size=6)
        shape = affine_shape(shape, [[a, b], [c, d]], (tx, ty))
    return shape


def parse_placement(text):
    words, values = tokenize(text)
    if not words or words[0] != "@":
        raise _syntax(_("A placement starts with '@'."))
    extra = [w for w in words[1:] if w != "reflect"]
    if extra or words.count("reflect") > 1:
        raise _syntax(_("Unexpected words in placement: %(words)s."), words=" ".join(words))
    _require(values, PLACEMENT_KEYS, set(), "placement")
    return Placement(
        scale=parse_float(values.get("scale", "1"), "scale"),
        rotation=parse_float(values.get("rot", "0"), "rot"),
        dx=parse_float(values.get("dx", "0"), "dx"),
        dy=parse_float(values.get("dy", "0"), "dy"),
        reflect="reflect" in words,
    )


def parse_halfplane(text):
    words, values = tokenize(text)
    if words != ["halfplane"]:
        raise _syntax(_("A half-plane starts with 'halfplane'."))
    _require(values, {"n", "d"}, {"n", "d"}, "halfplane")
    return HalfPlane(parse_vector(values["n"], "n", size=2), parse_float(values["d"], "d"))


def parse_region(text, shape=None):
    """
    A half-plane, ``<shape> @ ...`` or, given ``shape``, a bare ``@ ...``.
    """
    text = text.strip()
    if text.startswith("halfplane"):
        return parse_halfplane(text)
    head, sep, tail = text.partition("@")
    if head.strip():
        shape = parse_shape(head)
    elif shape is None:
        raise _syntax(_("Placement %(text)r has no shape."), text=text)
    placement = parse_placement("@" + tail) if sep else Placement()
    return PlacedShape(shape, placement)


def format_region(region, with_shape=True):
    if not region.bounded:
        return region.spec()
    if with_shape:
        return region.spec()
    return region.placement.spec()
