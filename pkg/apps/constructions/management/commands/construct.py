from django.utils.translation import gettext as _

from apps.chains.models import ChainConfig
from apps.constructions import properties, services
from apps.constructions.serializers import dump_construction, dump_graph
from apps.core.commands import DisklabCommand
from apps.geometry.choices import FamilyTag
from apps.geometry.grammar import parse_shape


class Command(DisklabCommand):
    help = _("Build the grid construction G(m,n) of a shape with its interior-realization")

    def add_command_arguments(self, parser):
        parser.add_argument("--shape", required=True)
        parser.add_argument("--family", choices=FamilyTag.values, default=FamilyTag.HOM)
        parser.add_argument("--m", type=int, required=True)
        parser.add_argument("--n", type=int, required=True)
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--out", help=_("Write the construction to this file"))
        parser.add_argument("--graph-out", help=_("Write the bare graph to this file"))
        parser.add_argument(
            "--check", action="store_true", help=_("Check the five structural properties")
        )

    def run(self, **options):
        cfg = ChainConfig.from_settings(seed=options["seed"])
        out = services.build_Gmn(
            parse_shape(options["shape"]),
            options["family"],
            options["m"],
            options["n"],
            cfg,
        )
        self.write_pairs(
            vertices=len(out.graph),
            edges=len(out.graph.edges),
            k=out.k,
            eps=out.params.epsilon,
            delta=out.params.delta,
        )
        if options["check"]:
            report = properties.check_properties(out)
            for prop in properties.PROPERTIES:
                self.write_pairs(property=prop, holds=report.holds(prop))
                for failure in report.failures[prop]:
                    self.write_pairs(property=prop, failure=failure)
        if options["out"]:
            self.write_file(options["out"], dump_construction(out))
        if options["graph_out"]:
            self.write_file(options["graph_out"], dump_graph(out.graph))
        return {"multistart_seed": cfg.seed}
