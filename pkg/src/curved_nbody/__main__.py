import sys

from curved_nbody.cli import main

sys.exit(main())
