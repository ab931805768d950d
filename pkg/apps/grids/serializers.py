"""
Mask, grid and realization files.

    mask m=<i>
    #..#          row j = m first, cell i = 1 leftmost
    ...

    grid z=(x,y) a=(x,y) b=(x,y) xs=(0,...,1) ys=(0,...,1)

    realization shape=<shape spec> family=<tag>
    <vertex-id> @ scale=<f> rot=<f> dx=<f> dy=<f> [reflect]
"""

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from apps.constructions.serializers import dump_regions, parse_region_line
from apps.geometry.choices import FamilyTag
from apps.geometry.grammar import parse_float, parse_shape, parse_vector, tokenize
from apps.grids.models import MGrid, PixelMask, Realization

MARKED, EMPTY = "#", "."


def _syntax(message, **params):
    return ValidationError(message, code="syntax", params=params)


def dump_mask(mask: PixelMask) -> str:
    lines = [f"mask m={mask.m}"]
    for j in range(mask.m, 0, -1):
        lines.append(
            "".join(MARKED if (i, j) in mask else EMPTY for i in range(1, mask.m + 1))
        )
    return "\n".join(lines) + "\n"


def load_mask(text) -> PixelMask:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise _syntax(_("Mask file is empty."))
    words, values = tokenize(lines[0])
    if words != ["mask"] or set(values) != {"m"}:
        raise _syntax(_("Expected 'mask m=<i>', got %(line)r."), line=lines[0])
    m = int(parse_float(values["m"], "m"))
    rows = lines[1:]
    if len(rows) != m or any(len(row) != m or set(row) - {MARKED, EMPTY} for row in rows):
        raise _syntax(_("A mask with m=%(m)s needs %(m)s rows of %(m)s '#' or '.'."), m=m)
    cells = {
        (i, m - row_index)
        for row_index, row in enumerate(rows)
        for i, char in enumerate(row, 1)
        if char == MARKED
    }
    return PixelMask(m, frozenset(cells))


def dump_grid(grid: MGrid) -> str:
    return grid.spec() + "\n"


def load_grid(text) -> MGrid:
    words, values = tokenize(text.strip())
    if words != ["grid"] or set(values) != {"z", "a", "b", "xs", "ys"}:
        raise _syntax(_("Expected 'grid z=.. a=.. b=.. xs=.. ys=..'."))
    return MGrid(
        parse_vector(values["z"], "z", size=2),
        parse_vector(values["a"], "a", size=2),
        parse_vector(values["b"], "b", size=2),
        parse_vector(values["xs"], "xs"),
        parse_vector(values["ys"], "ys"),
    )


def dump_realization(realization: Realization) -> str:
    lines = [
        f"realization shape={realization.shape.spec()} family={realization.family.value}"
    ]
    lines += dump_regions(realization.regions)
    return "\n".join(lines) + "\n"


def load_realization(text) -> Realization:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith("realization shape="):
        raise _syntax(_("Expected a 'realization shape=...' header."))
    spec, sep, tag = lines[0].removeprefix("realization shape=").rpartition(" family=")
    if not sep or tag not in FamilyTag.values:
        raise _syntax(_("The header needs family=hom|sim|sim-refl."))
    shape = parse_shape(spec)
    regions = {}
    for line in lines[1:]:
        vertex, region = parse_region_line(line, shape)
        regions[vertex] = region
    return Realization(shape, FamilyTag(tag), regions)
