#!/usr/bin/env python3
"""
cnct_accel
Convergence acceleration for slowly convergent real series: Van Wijngaarden
condensation combined with the delta transformation, Wynn's epsilon
algorithm, and the special functions and Lerch distributions built on them.
"""

import sys

from .utils import logger


def main():
    """Console entry point; the HTTP endpoints are started separately
    (see cnct_accel.flask_endpoints.run_server or wsgi.py)."""
    from .cli import main as cli_main

    code = cli_main()
    logger.debug(f"cnct-accel exiting with code {code}")
    sys.exit(code)


if __name__ == '__main__':
    main()
