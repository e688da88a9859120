"""``python -m crossdiff``."""

import sys

from crossdiff.cli import main

if __name__ == "__main__":
    sys.exit(main())
