import sys

from bornlab.cli import main

sys.exit(main())
