"""Sweep the filter's disturbance bound on a fixed head-on wall approach.

Larger bounds should stall the vehicle earlier (higher minimum clearance)
at the price of larger reference corrections; the table makes that
trade-off visible.
"""

import argparse

from mavsafe.harness import run_trial, summarize
from mavsafe.scenarios import monotonic_approach_scenario


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--eps", type=float, nargs="+",
                        default=(0.0, 0.05, 0.1, 0.15, 0.2),
                        help="disturbance bounds to sweep")
    args = parser.parse_args()

    header = f"{'eps':>6} {'h_min':>8} {'mean corr':>10} {'distance':>9}"
    print(header)
    print("-" * len(header))
    for eps in args.eps:
        summary = summarize(run_trial(monotonic_approach_scenario(eps),
                                      filter_enabled=True, seed=0))
        print(f"{eps:>6.2f} {summary.h_min:>8.3f} "
              f"{summary.mean_correction:>10.4f} {summary.d:>9.2f}")


if __name__ == "__main__":
    main()
