import sys

from ftnn.cli import main

sys.exit(main())
