"""Full Table 1 grid at acceptance settings (100 runs, N=200, 10^5 MC points)."""

import sys

from conehull.cli import main

if __name__ == "__main__":
    args = sys.argv[1:] or ["--out", "results/table1"]
    sys.exit(main(["table1", "--runs", "100", "--mc", "100000", *args]))
