#!/usr/bin/env python3
"""
Run the clue CLI from a source checkout without installing it.
"""
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from clue.cli import main

if __name__ == '__main__':
    sys.exit(main())
