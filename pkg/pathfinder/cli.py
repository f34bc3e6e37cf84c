"""Console entry point: ``pathfinder <stage> [options]``.

Outside a Django project the command configures minimal settings itself; set
``DJANGO_SETTINGS_MODULE`` to override any ``PATHFINDER_*`` value.
"""
import os
import sys

from pathfinder.errors import EXIT_OK, EXIT_USAGE

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '%(asctime)-15s %(levelname)-7s %(message)s [%(funcName)s (%(filename)s:%(lineno)s)]',
        }
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'verbose'
        }
    },
    'loggers': {
        'pathfinder': {
            'handlers': ['console'],
            'level': 'INFO'
        }
    },
}


def configure():
    from django.conf import settings

    if not settings.configured and not os.environ.get('DJANGO_SETTINGS_MODULE'):
        settings.configure(INSTALLED_APPS=['pathfinder'], LOGGING=LOGGING, USE_TZ=True)
    import django

    django.setup()


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    configure()
    from django.core.management import call_command
    from django.core.management.base import CommandError

    try:
        call_command('pathfinder', *argv)
    except CommandError as e:
        sys.stderr.write('pathfinder: %s\n' % e)
        return e.returncode
    except SystemExit as e:
        # argparse exits on --help and on errors raised from the top-level parser
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
