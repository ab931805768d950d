from pathlib import Path

from django.utils.translation import gettext as _

from apps.core.commands import DisklabCommand, UsageError
from apps.grids import services
from apps.grids.serializers import load_grid, load_realization


class Command(DisklabCommand):
    help = _("Grid regularity margins, or size ratios of a realized gadget")

    def add_command_arguments(self, parser):
        parser.add_argument("--grid", metavar="PATH")
        parser.add_argument("--c", type=float, help=_("Regularity constant, positive"))
        parser.add_argument("--realization", metavar="PATH")
        parser.add_argument("--kind", choices=("k2n", "ln"))

    def run(self, **options):
        if options["grid"] and options["c"] is not None:
            if not options["c"] > 0:
                raise UsageError(_("--c must be positive"))
            grid = load_grid(Path(options["grid"]).read_text())
            for row in services.grid_diagnostics(grid, options["c"]):
                self.write_pairs(
                    check=row.name,
                    value=row.value,
                    bound=row.bound,
                    margin=row.margin,
                    passed=row.passed,
                )
        elif options["realization"] and options["kind"]:
            realization = load_realization(Path(options["realization"]).read_text())
            for name, value in services.radius_ratio_report(realization, options["kind"]).items():
                self.write_pairs(**{name: value})
        else:
            raise UsageError(_("give --grid with --c, or --realization with --kind"))
