import sys

from mediatrix.cli import main

sys.exit(main())
