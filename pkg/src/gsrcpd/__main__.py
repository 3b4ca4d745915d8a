"""``python -m gsrcpd``: exit with the CLI's status code."""

from __future__ import annotations

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
