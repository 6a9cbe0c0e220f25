import sys

from sukp.cli import main

sys.exit(main())
