#!/usr/bin/env python3
"""Run the full desk-scale experiment suite (M=500, K=5, 8x8 beams).

Writes one subdirectory per experiment under --out.  Finishes in a couple
of minutes on a laptop; see run_full_scale.py for the big configuration.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from mmtc_outage import cli

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=str(ROOT / "configs" / "desk.cfg"))
    parser.add_argument("--out", default="results/desk", metavar="DIR")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--reps", type=int, default=1,
                        help="scenario repetitions per sweep point")
    args = parser.parse_args()

    shared = ["--config", args.config, "--seed", str(args.seed)]
    runs = [
        ("scenario", ["gen"]),
        ("cdf_compare", ["approx", "--sensor", "0", "--grid-points", "4096"]),
        ("error_vs_m", ["sweep", "error_vs_m",
                        "--values", "100,200,500,1000", "--grid-points", "1024"]),
        ("error_vs_p", ["sweep", "error_vs_p",
                        "--values", "0.05,0.1,0.2,0.3,0.5", "--grid-points", "1024"]),
        ("outage_vs_m", ["sweep", "outage_vs_m",
                         "--values", "100,200,300,500", "--method", "gc5",
                         "--reps", str(args.reps)]),
        ("outage_vs_p", ["sweep", "outage_vs_p",
                         "--values", "0.05,0.1,0.2,0.3", "--method", "gc5",
                         "--reps", str(args.reps)]),
        ("outage_cdf_single", ["sweep", "outage_cdf", "--mode", "single",
                               "--reps", str(args.reps)]),
        ("outage_cdf_multiple", ["sweep", "outage_cdf", "--mode", "multiple",
                                 "--reps", str(args.reps)]),
    ]
    for name, argv in runs:
        out_dir = Path(args.out) / name
        tic = time.perf_counter()
        code = cli.main([*argv, *shared, "--out", str(out_dir)])
        if code != 0:
            print(f"{name}: FAILED (exit {code})", file=sys.stderr)
            return code
        print(f"{name}: done in {time.perf_counter() - tic:.1f}s -> {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
