"""Entry point for `python -m lowprec_lab`; same as the `lowprec-lab` script."""

import sys

from .cli_main import main

if __name__ == "__main__":
    sys.exit(main())
