import sys

from activecloak.cli import main

sys.exit(main())
