"""Rate experiments for all three metrics on S1 at acceptance settings."""

import sys

from conehull.cli import main

SETTINGS = {
    "measure": ["--n-list", "200,400,800,1600,3200", "--runs", "50", "--mc", "100000"],
    "hausdorff": ["--n-list", "200,400,800,1600,3200", "--runs", "50", "--grid", "512"],
    "boundary": ["--n-list", "800,1600,3200", "--runs", "30", "--grid", "512"],
}

if __name__ == "__main__":
    prefix = sys.argv[1] if len(sys.argv) > 1 else "results/rates"
    for metric, extra in SETTINGS.items():
        rc = main(["rates", "--metric", metric, *extra, "--out", f"{prefix}_{metric}"])
        if rc:
            sys.exit(rc)
