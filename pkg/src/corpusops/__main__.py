import sys

from corpusops.cli import main

sys.exit(main())
