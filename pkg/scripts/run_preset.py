#!/usr/bin/env python3
"""Run a bundled experiment preset and write its CSV.

Thin wrapper over the package CLI, kept so the common workflow is one command
from a fresh checkout:

    python3 scripts/run_preset.py fig2 --out results/fig2.csv
    python3 scripts/run_preset.py fig5 --trials 200 --seed 7

Anything after the preset name is passed through to `clmp run`.
"""

import sys

from clmp.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    if not args or args[0].startswith("-"):
        print(__doc__, file=sys.stderr)
        sys.exit(2)
    sys.exit(main(["run", "--preset", args[0], *args[1:]]))
