from pathlib import Path

from django.utils.translation import gettext as _

from apps.core.commands import DisklabCommand
from apps.geometry import services as geometry
from apps.geometry.grammar import parse_shape
from apps.geometry.models import affine_shape
from apps.grids import services
from apps.grids.models import MGrid
from apps.grids.serializers import load_grid, load_mask


class Command(DisklabCommand):
    help = _("Estimate a convex shape from a pixel mask")

    def add_command_arguments(self, parser):
        parser.add_argument("--mask", metavar="PATH", required=True)
        parser.add_argument("--grid", metavar="PATH", help=_("Defaults to the unit square grid"))
        parser.add_argument(
            "--shape", help=_("Reference shape; its unit-box normalization is compared")
        )
        parser.add_argument("--out", help=_("Write the estimate polygon to this file"))

    def run(self, **options):
        mask = load_mask(Path(options["mask"]).read_text())
        grid = load_grid(Path(options["grid"]).read_text()) if options["grid"] else None
        result = services.reconstruct_shape(mask, grid)
        self.write_pairs(vertices=len(result.estimate.pts), bound=result.bound)
        self.write_pairs(estimate=result.estimate.spec())
        if options["shape"]:
            base, _f = geometry.normalize_to_unit_bbox(parse_shape(options["shape"]))
            f = (grid or MGrid.uniform(mask.m)).affine_map
            reference = affine_shape(base, f.linear, f.translation)
            distance = geometry.hausdorff(result.estimate, reference)
            self.write_pairs(hausdorff=distance, within_bound=distance <= result.bound)
        if options["out"]:
            self.write_file(options["out"], result.estimate.spec() + "\n")
