"""Reproduce the settled cases n = 1..5 and print the extremality diagnostics.

    python scripts/proved_cases.py --restarts 200
"""

import argparse
import math

from krzyz.checker import Tolerances
from krzyz.measure import conjectured_extremal
from krzyz.optimizer import SearchOptions, parameter_distance, sweep_N, verify_extremality


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=5)
    ap.add_argument("--restarts", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    opts = SearchOptions(restarts=args.restarts, seed=args.seed)
    for n in range(1, args.n_max + 1):
        r = sweep_N(n, opts)
        report = verify_extremality(r, Tolerances())
        per_N = " ".join(f"{k}:{v:.6f}" for k, v in sorted(r.per_N.items()))
        print(f"n={n}  value={r.value:.12f}  |value-2/e|={abs(r.value - 2 / math.e):.1e}  per-N {per_N}")
        print(f"     distance to exp((z^n-1)/(z^n+1)): {parameter_distance(r.best, conjectured_extremal(n)):.2e}")
        verdicts = "".join(v.verdict[0] for v in report.conditions.values())
        print(f"     conditions a..q: {verdicts}  (h = holds, f = fails, a = approximate)")
        for name, v in report.necessary.items():
            print(f"     {name:<20s} {v['value']: .3e}  {'ok' if v['passed'] else 'VIOLATED'}")


if __name__ == "__main__":
    main()
