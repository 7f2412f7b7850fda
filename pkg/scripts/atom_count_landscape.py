"""Distribution of local maxima of |a_n| for each atom count N.

    python scripts/atom_count_landscape.py --n 6 --restarts 100 --out artifacts/landscape_n6.csv

Each CSV row is one restart: N, final value, convergence flag.  Distinct
values (rounded to 1e-9) are summarised on stdout.
"""

import argparse
import collections
import csv
from pathlib import Path

from krzyz.optimizer import SearchOptions, multistart


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, required=True)
    ap.add_argument("--restarts", type=int, default=100)
    ap.add_argument("--max-iters", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=None)
    args = ap.parse_args()

    opts = SearchOptions(args.restarts, args.max_iters, seed=args.seed)
    rows = []
    for N in range(1, args.n + 1):
        r = multistart(args.n, N, opts)
        values = collections.Counter(round(h.value, 9) for h in r.history if h.converged)
        top = ", ".join(f"{v:.9f} x{c}" for v, c in sorted(values.items(), reverse=True)[:4])
        print(f"N={N}: best {r.value:.12f}, {len(values)} distinct values; top: {top}")
        rows += [[h.N, h.value, int(h.converged)] for h in r.history]
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["N_final", "value", "converged"])
            w.writerows(rows)


if __name__ == "__main__":
    main()
