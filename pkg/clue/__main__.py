import sys

from clue.cli import main

sys.exit(main())
