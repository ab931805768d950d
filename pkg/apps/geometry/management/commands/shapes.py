import math

from django.utils.translation import gettext as _

from apps.core.commands import DisklabCommand
from apps.geometry import services
from apps.geometry.grammar import parse_placement, parse_shape
from apps.geometry.models import PlacedShape, Placement


class Command(DisklabCommand):
    help = _("Parse a shape, print its canonical form and basic measurements")

    def add_command_arguments(self, parser):
        parser.add_argument("--shape", required=True)
        parser.add_argument("--place", default=None, help=_("Placement '@ scale=..'"))
        parser.add_argument(
            "--directions",
            type=int,
            default=8,
            help=_("Number of equally spaced support directions to tabulate"),
        )
        parser.add_argument(
            "--normalize",
            action="store_true",
            help=_("Also print the unit-bounding-box normalization"),
        )

    def run(self, **options):
        shape = parse_shape(options["shape"])
        placement = parse_placement(options["place"]) if options["place"] else Placement()
        region = PlacedShape(shape, placement)

        self.write_pairs(shape=shape.spec())
        self.write_pairs(placement=placement.spec())
        box = services.bounding_box(region)
        self.write_pairs(x1=box.x1, x2=box.x2, y1=box.y1, y2=box.y2)
        self.write_pairs(diameter=services.diameter(region))
        self.write_pairs(area=services.area(region))

        count = max(1, options["directions"])
        self.write_row("angle", "ux", "uy", "value", "px", "py")
        for index in range(count):
            angle = 2.0 * math.pi * index / count
            u = (math.cos(angle), math.sin(angle))
            value, point = services.support(shape, placement, u)
            self.write_row(angle, u[0], u[1], value, float(point[0]), float(point[1]))

        if options["normalize"]:
            normalized, f = services.normalize_to_unit_bbox(region)
            self.write_pairs(normalized=normalized.spec())
            self.write_pairs(map=f.spec())
