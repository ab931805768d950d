from pathlib import Path

from django.utils.translation import gettext as _

from apps.constructions.serializers import load_construction, load_graph
from apps.core.commands import DisklabCommand, UsageError
from apps.grids import services
from apps.grids.serializers import dump_mask


class Command(DisklabCommand):
    help = _("Read the pixel mask of a grid construction off its graph")

    def add_command_arguments(self, parser):
        parser.add_argument("--construction", metavar="PATH")
        parser.add_argument("--graph", metavar="PATH")
        parser.add_argument("--m", type=int)
        parser.add_argument("--out", help=_("Write the mask to this file"))

    def run(self, **options):
        shape = None
        if options["construction"]:
            out = load_construction(Path(options["construction"]).read_text())
            graph, m, shape = out.graph, out.m, out.shape
        elif options["graph"] and options["m"] is not None:
            graph = load_graph(Path(options["graph"]).read_text())
            m = options["m"]
        else:
            raise UsageError(_("give --construction PATH or --graph PATH with --m"))
        mask = services.pixel_mask(graph, m)
        self.write_pairs(m=mask.m, marked=len(mask))
        if shape is not None:
            report = services.pixel_count_report(mask, shape)
            self.write_pairs(
                inner=report.inner,
                boundary=report.boundary,
                sandwiched=report.sandwiched,
                inner_margin=report.inner_margin,
                boundary_margin=report.boundary_margin,
            )
        if options["out"]:
            self.write_file(options["out"], dump_mask(mask))
        else:
            self.stdout.write(dump_mask(mask), ending="")
