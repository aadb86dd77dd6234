import sys

from hopperstat.cli import main

sys.exit(main())
