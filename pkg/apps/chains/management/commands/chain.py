from pathlib import Path

from django.utils.translation import gettext as _

from apps.chains import services
from apps.chains.models import ChainConfig
from apps.chains.serializers import dump_chain, load_chain
from apps.core.commands import DisklabCommand, UsageError
from apps.geometry.choices import FamilyTag
from apps.geometry.grammar import parse_shape


class Command(DisklabCommand):
    help = _("Build the longest n-chain of a shape, or check a chain file")

    def add_command_arguments(self, parser):
        parser.add_argument("--shape")
        parser.add_argument("--family", choices=FamilyTag.values, default=FamilyTag.SIM)
        parser.add_argument("--n", type=int)
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--out")
        parser.add_argument("--check", metavar="PATH", help=_("Chain file to validate"))

    def run(self, **options):
        if options["check"]:
            chain = load_chain(Path(options["check"]).read_text())
        elif options["shape"] and options["n"] is not None:
            cfg = ChainConfig.from_settings(seed=options["seed"])
            chain = services.max_chain(
                parse_shape(options["shape"]), options["family"], options["n"], cfg
            )
            if options["out"]:
                self.write_file(options["out"], dump_chain(chain))
        else:
            raise UsageError(_("give --check PATH or --shape with --n"))
        report = services.chain_check(chain)
        self.write_pairs(
            n=len(chain),
            valid=report.valid,
            strict=report.strict,
            length=report.length,
        )
        for violation in report.violations:
            self.write_pairs(violation=violation)
        return {"seed": chain.seed} if chain.seed is not None else {}
