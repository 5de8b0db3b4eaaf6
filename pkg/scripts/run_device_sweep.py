#!/usr/bin/env python3
"""Emit the single-device weight-change curve (voltage vs delta weight)."""

import sys

from neurofuzzy.cli import main

if __name__ == "__main__":
    sys.exit(main(["crossbar-compare", "--sweep-only"] + sys.argv[1:]))
