import sys

from exco.cli import main

if __name__ == "__main__":
    sys.exit(main())
