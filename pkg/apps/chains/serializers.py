"""
Chain files:

    strip u=(ux,uy) d1=<f> d2=<f>
    family hom|sim|sim-refl
    shape <shape spec>
    @ scale=<f> rot=<f> dx=<f> dy=<f> [reflect]
    ...
"""

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from apps.chains.models import Chain, Strip
from apps.geometry.choices import FamilyTag
from apps.geometry.grammar import parse_float, parse_placement, parse_shape, parse_vector, tokenize


def dump_strip(strip: Strip) -> str:
    return strip.spec()


def parse_strip(text) -> Strip:
    words, values = tokenize(text)
    if words != ["strip"] or set(values) != {"u", "d1", "d2"}:
        raise ValidationError(
            _("Expected 'strip u=(..) d1=.. d2=..', got %(text)r."),
            code="syntax",
            params={"text": text},
        )
    return Strip(
        parse_vector(values["u"], "u", size=2),
        parse_float(values["d1"], "d1"),
        parse_float(values["d2"], "d2"),
    )


def dump_chain(chain: Chain) -> str:
    lines = [
        dump_strip(chain.strip),
        f"family {chain.family.value}",
        f"shape {chain.shape.spec()}",
    ]
    lines += [p.spec() for p in chain.placements]
    return "\n".join(lines) + "\n"


def load_chain(text) -> Chain:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if len(lines) < 3:
        raise ValidationError(_("Chain file is truncated."), code="syntax")
    strip = parse_strip(lines[0])
    head, _sep, tag = lines[1].partition(" ")
    if head != "family" or tag not in FamilyTag.values:
        raise ValidationError(
            _("Expected 'family <tag>', got %(line)r."),
            code="syntax",
            params={"line": lines[1]},
        )
    head, _sep, spec = lines[2].partition(" ")
    if head != "shape":
        raise ValidationError(
            _("Expected 'shape <spec>', got %(line)r."),
            code="syntax",
            params={"line": lines[2]},
        )
    return Chain(
        shape=parse_shape(spec),
        strip=strip,
        placements=tuple(parse_placement(line) for line in lines[3:]),
        family=FamilyTag(tag),
    )
