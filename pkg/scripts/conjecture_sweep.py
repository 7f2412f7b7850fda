"""Multistart search for n in a range, logging best values and local-maximum counts.

    python scripts/conjecture_sweep.py --n-min 6 --n-max 10 --restarts 500 --out artifacts/sweep

Writes one result JSON and one per-restart CSV per n, plus summary.csv.
Any value above 2/e + 1e-6 is written to EXCEEDANCE.json and makes the
script exit with status 1.
"""

import argparse
import csv
import json
import logging
import math
import time
from pathlib import Path

from krzyz.optimizer import SearchOptions, multistart, sweep_N

TWO_OVER_E = 2 / math.e


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-min", type=int, default=6)
    ap.add_argument("--n-max", type=int, default=10)
    ap.add_argument("--restarts", type=int, default=500)
    ap.add_argument("--max-iters", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sweep-N", action="store_true", help="also try every atom count below n")
    ap.add_argument("--parallel", action="store_true")
    ap.add_argument("--out", type=Path, default=Path("artifacts/sweep"))
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    args.out.mkdir(parents=True, exist_ok=True)
    opts = SearchOptions(args.restarts, args.max_iters, seed=args.seed, parallel=args.parallel)
    rows, exceed = [], {}
    for n in range(args.n_min, args.n_max + 1):
        t0 = time.perf_counter()
        r = sweep_N(n, opts) if args.sweep_N else multistart(n, n, opts)
        elapsed = time.perf_counter() - t0
        (args.out / f"n{n}.json").write_text(json.dumps(r.to_dict(), indent=2) + "\n")
        (args.out / f"n{n}.csv").write_text(r.history_csv())
        hits = sum(1 for h in r.history if h.converged and abs(h.value - TWO_OVER_E) < 1e-9)
        rows.append([n, repr(r.value), r.value - TWO_OVER_E, r.cluster_count, hits, len(r.history), f"{elapsed:.1f}"])
        print(f"n={n:2d}  best={r.value:.12f}  gap={r.value - TWO_OVER_E:+.2e}  "
              f"clusters={r.cluster_count}  hits={hits}/{len(r.history)}  {elapsed:.1f}s")
        if r.value > TWO_OVER_E + 1e-6:
            exceed[n] = r.to_dict()

    with open(args.out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "best", "gap_to_2_over_e", "cluster_count", "runs_at_2_over_e", "runs", "seconds"])
        w.writerows(rows)
    if exceed:
        (args.out / "EXCEEDANCE.json").write_text(json.dumps(exceed, indent=2) + "\n")
        print("!!! value above 2/e found; see EXCEEDANCE.json")
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
