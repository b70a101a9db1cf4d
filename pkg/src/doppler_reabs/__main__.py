"""python -m doppler_reabs entry point."""

import sys

from .cli import main

sys.exit(main())
