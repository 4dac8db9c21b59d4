import sys

from lpgnet.cli import main

sys.exit(main())
