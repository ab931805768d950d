from pathlib import Path

from django.utils.translation import gettext as _

from apps.chains.serializers import load_chain
from apps.constructions.serializers import load_construction, load_graph
from apps.core import svg
from apps.core.commands import DisklabCommand, UsageError
from apps.grids.serializers import load_grid, load_mask, load_realization

SCENES = ("construction", "realization", "chain", "mask", "graph")


class Command(DisklabCommand):
    help = _("Render a construction, realization, chain, pixel mask or graph as SVG")

    def add_command_arguments(self, parser):
        scene = parser.add_mutually_exclusive_group(required=True)
        for name in SCENES:
            scene.add_argument(f"--{name}", metavar="PATH")
        parser.add_argument(
            "--grid", metavar="PATH", help=_("Grid under --mask; the unit square grid by default")
        )
        parser.add_argument("--out", metavar="PATH", required=True)

    def render(self, scene, text, grid_path):
        if scene == "construction":
            return svg.render_construction(load_construction(text))
        if scene == "realization":
            return svg.render_realization(load_realization(text))
        if scene == "chain":
            return svg.render_chain(load_chain(text))
        if scene == "mask":
            grid = load_grid(Path(grid_path).read_text()) if grid_path else None
            return svg.render_mask(load_mask(text), grid)
        return svg.render_graph(load_graph(text))

    def run(self, **options):
        scene = next(name for name in SCENES if options[name])
        if options["grid"] and scene != "mask":
            raise UsageError(_("--grid goes with --mask only"))
        text = Path(options[scene]).read_text()
        self.write_file(options["out"], self.render(scene, text, options["grid"]))
        self.write_pairs(scene=scene, out=options["out"])
        if scene == "graph":
            return {"layout_seed": svg.GRAPH_LAYOUT_SEED}
