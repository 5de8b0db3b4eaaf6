#!/usr/bin/env python3
"""Reproduce the five benchmark modeling rows with table-pinned settings."""

import sys

from neurofuzzy.cli import main

if __name__ == "__main__":
    sys.exit(main(["suite", "--only", "table1"] + sys.argv[1:]))
