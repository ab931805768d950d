import logging
from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError
from django.utils.translation import gettext as _

from apps.core.exceptions import DisklabError
from apps.core.manifest import RunManifest
from apps.core.utils import fmt_float

logger = logging.getLogger(__name__)

BASE_OPTIONS = {
    "verbosity",
    "settings",
    "pythonpath",
    "traceback",
    "no_color",
    "force_color",
    "skip_checks",
    "stdout",
    "stderr",
    "manifest",
}


class UsageError(CommandError):
    def __init__(self, message):
        super().__init__(f"error:usage:{message}", returncode=2)


class ComputationError(CommandError):
    def __init__(self, kind, message):
        super().__init__(f"error:{kind}:{message}", returncode=1)


def validation_message(exc: ValidationError) -> str:
    return "; ".join(str(m) for m in exc.messages)


class DisklabCommand(BaseCommand):
    """
    Base for the disklab commands.

    Subclasses implement ``add_command_arguments`` and ``run``; ``run`` may
    return a dict of seeds for the manifest. Input problems surface as
    ``error:usage:`` with exit code 2, computational failures as
    ``error:<kind>:`` with exit code 1.
    """

    requires_system_checks = []

    @property
    def command_name(self):
        return self.__module__.rsplit(".", 1)[-1].replace("_", "-")

    def add_arguments(self, parser):
        parser.add_argument(
            "--manifest",
            help=_("Also write the run manifest to this JSON file."),
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, **options):
        raise NotImplementedError

    def handle(self, *args, **options):
        parameters = {k: v for k, v in options.items() if k not in BASE_OPTIONS}
        manifest = RunManifest.start(self.command_name, parameters)
        try:
            seeds = self.run(**options)
        except ValidationError as exc:
            raise UsageError(validation_message(exc)) from exc
        except DisklabError as exc:
            logger.warning(
                _("Command %(command)s failed: %(error)s"),
                {"command": self.command_name, "error": exc},
            )
            raise ComputationError(exc.kind, str(exc)) from exc
        except OSError as exc:
            raise ComputationError("io", str(exc)) from exc
        manifest.finish(seeds)
        self.stderr.write(manifest.to_json())
        if options.get("manifest"):
            try:
                Path(options["manifest"]).write_text(manifest.to_json() + "\n")
            except OSError as exc:
                raise ComputationError("io", str(exc)) from exc

    def write_row(self, *cells):
        self.stdout.write("\t".join(self._cell(c) for c in cells))

    def write_pairs(self, **pairs):
        self.write_row(*(f"{k}={self._cell(v)}" for k, v in pairs.items()))

    @staticmethod
    def _cell(value):
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return fmt_float(value)
        return str(value)

    def write_file(self, path, text):
        Path(path).write_text(text)
        self.stderr.write(
            self.style.SUCCESS(_("Wrote %(path)s") % {"path": path})
        )
