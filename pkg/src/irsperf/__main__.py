import sys

from irsperf.cli import main

sys.exit(main())
