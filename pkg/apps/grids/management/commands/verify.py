from pathlib import Path

from django.utils.translation import gettext as _

from apps.constructions.extraction import extract_graph
from apps.constructions.serializers import load_construction, load_graph
from apps.core.commands import DisklabCommand, UsageError
from apps.grids import conversion, services
from apps.grids.serializers import dump_realization, load_realization


class Command(DisklabCommand):
    help = _("Check a construction or a realization against its graph")

    def add_command_arguments(self, parser):
        parser.add_argument("--construction", metavar="PATH")
        parser.add_argument(
            "--convert",
            action="store_true",
            help=_("Turn the interior-realization into a realization"),
        )
        parser.add_argument("--out", help=_("Write the converted realization here"))
        parser.add_argument("--graph", metavar="PATH")
        parser.add_argument("--realization", metavar="PATH")

    def run(self, **options):
        if options["construction"]:
            self._construction(options)
        elif options["graph"] and options["realization"]:
            graph = load_graph(Path(options["graph"]).read_text())
            realization = load_realization(Path(options["realization"]).read_text())
            self._report(services.verify_realization(graph, realization))
        else:
            raise UsageError(_("give --construction PATH or --graph and --realization"))

    def _construction(self, options):
        out = load_construction(Path(options["construction"]).read_text())
        found = extract_graph(out.realization)
        missing = out.graph.edges - found.edges
        extra = found.edges - out.graph.edges
        self.write_pairs(
            vertices=len(out.graph),
            edges=len(out.graph.edges),
            interior_missing=len(missing),
            interior_extra=len(extra),
        )
        if options["convert"]:
            realization = conversion.to_realization(out.realization, out.graph)
            self._report(services.verify_realization(out.graph, realization))
            if options["out"]:
                self.write_file(options["out"], dump_realization(realization))

    def _report(self, mismatches):
        self.write_pairs(mismatches=len(mismatches))
        for mismatch in mismatches:
            self.write_row(mismatch.kind, mismatch.a, mismatch.b)
