import sys

from avlang.cli import main

sys.exit(main())
