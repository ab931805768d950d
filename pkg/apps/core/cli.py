"""
Entry point of the ``disklab`` console script.

    disklab <command> [flags]

Commands are the project's management commands, so ``python manage.py
<command>`` behaves the same. Exit codes: 0 success, 1 computational
failure, 2 usage error.
"""

import os
import sys

from django.core.management import call_command
from django.core.management.base import CommandError
from django.utils.translation import gettext as _

COMMANDS = (
    "shapes",
    "stretch",
    "chain",
    "construct",
    "verify",
    "mask",
    "reconstruct",
    "classify",
    "export-svg",
    "diagnose",
)


def run(argv, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if not argv or argv[0] not in COMMANDS:
        got = argv[0] if argv else ""
        stderr.write(
            "error:usage:"
            + _("unknown command %(command)r; expected one of %(commands)s")
            % {"command": got, "commands": ", ".join(COMMANDS)}
            + "\n"
        )
        return 2
    try:
        call_command(
            argv[0].replace("-", "_"), *argv[1:], stdout=stdout, stderr=stderr
        )
    except CommandError as exc:
        message = str(exc)
        code = exc.returncode
        if not message.startswith("error:"):
            message = "error:usage:" + message.removeprefix("Error: ")
            code = 2
        stderr.write(message + "\n")
        return code
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0
    return 0


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings.base")
    import django

    django.setup()
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
