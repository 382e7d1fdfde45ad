"""Main entry point for the nsceval command line interface."""

import sys

from nsceval.cli import main

if __name__ == "__main__":
    sys.exit(main())
