import sys

from m2lads.cli import main

if __name__ == "__main__":
    sys.exit(main())
