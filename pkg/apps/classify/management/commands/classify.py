from django.utils.translation import gettext as _

from apps.classify import services
from apps.classify.choices import FitMode
from apps.classify.models import FitConfig
from apps.classify.serializers import dump_verdict
from apps.core.commands import DisklabCommand, UsageError
from apps.geometry.grammar import parse_shape


class Command(DisklabCommand):
    help = _("Decide whether two shapes are affine images or similar copies")

    def add_command_arguments(self, parser):
        parser.add_argument("--a", required=True, metavar="SPEC")
        parser.add_argument("--b", required=True, metavar="SPEC")
        parser.add_argument("--mode", choices=FitMode.values, required=True)
        parser.add_argument("--tau", type=float, default=None)
        parser.add_argument(
            "--no-reflection",
            action="store_true",
            help=_("Only similarities that keep orientation"),
        )
        parser.add_argument("--seeds", type=int, default=None, help=_("Rotational seeds"))

    def run(self, **options):
        a_shape, b_shape = parse_shape(options["a"]), parse_shape(options["b"])
        if options["seeds"] is not None and options["seeds"] < 1:
            raise UsageError(_("--seeds must be at least 1"))
        cfg = FitConfig.from_settings(seeds=options["seeds"], tau=options["tau"])
        verdict = services.classify_pair(
            a_shape,
            b_shape,
            options["mode"],
            cfg.tau,
            allow_reflection=not options["no_reflection"],
            cfg=cfg,
        )
        if not verdict.fit.converged:
            self.stderr.write(self.style.WARNING(_("optimizer did not converge")))
        self.stdout.write(dump_verdict(verdict), ending="")
        return {"classify_seeds": cfg.seeds}
