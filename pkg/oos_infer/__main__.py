"""Allow ``python -m oos_infer``."""

import sys

from oos_infer.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
