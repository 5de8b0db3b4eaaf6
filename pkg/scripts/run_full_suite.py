#!/usr/bin/env python3
"""Run every study (modeling, growing data, classification, noise, fault)."""

import sys

from neurofuzzy.cli import main

if __name__ == "__main__":
    sys.exit(main(["suite"] + sys.argv[1:]))
