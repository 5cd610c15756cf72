"""
Run the ``autbound`` command without a Django project.

A minimal settings module is configured when none is present, so the
command works from a plain console script.
"""
import sys

import django
from django.conf import settings


def setup():
    if not settings.configured:
        settings.configure(INSTALLED_APPS=["django_autbound"])
    django.setup()


def run(argv, *, stdout=None, stderr=None):
    """Run the command on ``argv`` and return its exit code."""
    from django_autbound.management.commands.autbound import Command

    setup()
    command = Command(stdout=stdout, stderr=stderr)
    try:
        command.run_from_argv(["autbound", "autbound", *argv])
    except SystemExit as e:
        if e.code is None:
            return 0
        return e.code if isinstance(e.code, int) else 1
    return 0


def main():  # pragma: no cover
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":  # pragma: no cover
    main()
