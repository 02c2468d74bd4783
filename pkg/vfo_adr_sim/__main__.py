import sys

from vfo_adr_sim.cli import main

if __name__ == "__main__":
    sys.exit(main())
