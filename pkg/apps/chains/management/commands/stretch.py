from django.utils.translation import gettext as _

from apps.chains import services
from apps.chains.models import ChainConfig
from apps.chains.serializers import dump_chain
from apps.core.commands import DisklabCommand, UsageError
from apps.geometry.choices import FamilyTag
from apps.geometry.grammar import parse_shape


class Command(DisklabCommand):
    help = _("Tabulate chain lengths sigma(n) and bound the stretch of a shape")

    def add_command_arguments(self, parser):
        parser.add_argument("--shape", required=True)
        parser.add_argument("--family", choices=FamilyTag.values, default=FamilyTag.SIM)
        group = parser.add_mutually_exclusive_group(required=True)
        group.add_argument("--n", type=int, help=_("Single chain length"))
        group.add_argument("--n-max", type=int, help=_("Table for n = 1 .. n-max"))
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--starts", type=int, default=None)
        parser.add_argument("--out", help=_("Write the longest chain to this file"))

    def run(self, **options):
        shape = parse_shape(options["shape"])
        family = FamilyTag(options["family"])
        if options["starts"] is not None and options["starts"] < 1:
            raise UsageError(_("--starts must be at least 1"))
        cfg = ChainConfig.from_settings(seed=options["seed"], starts=options["starts"])

        if options["n"] is not None:
            chain = services.max_chain(shape, family, options["n"], cfg)
            self.write_pairs(n=options["n"], sigma=services.chain_length(chain))
        else:
            estimate = services.stretch_bounds(shape, options["n_max"], cfg, family)
            for row in estimate.rows:
                self.write_pairs(n=row.n, sigma=row.length)
            self.write_pairs(
                sigma1_upper=estimate.single.upper,
                padding=estimate.single.padding,
                certified_lower=estimate.certified_lower,
                heuristic=estimate.heuristic,
            )
            chain = estimate.rows[-1].chain
        if not chain.converged:
            self.stderr.write(self.style.WARNING(_("optimizer did not converge")))
        if options["out"]:
            self.write_file(options["out"], dump_chain(chain))
        return {"multistart_seed": cfg.seed, "starts": cfg.starts}
