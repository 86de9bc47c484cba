"""Run randomized wall-crossing trials with the filter off and on.

Prints one row per seed comparing the unfiltered script (which penetrates
the wall) against the filtered run, and a final verdict line.
"""

import argparse

from mavsafe.harness import run_trial, summarize
from mavsafe.scenarios import wall_crossing_scenario

DISTURBANCE_LEVELS = (0.0, 0.05, 0.1)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=10,
                        help="number of random scenes (default 10)")
    args = parser.parse_args()

    header = (f"{'seed':>4} {'eps_true':>8} {'off n_c':>8} {'off h_min':>10} "
              f"{'on h_min':>10} {'on corr':>8} {'on dist':>8}")
    print(header)
    print("-" * len(header))
    all_safe = True
    for seed in range(args.trials):
        scenario = wall_crossing_scenario(
            seed=seed, eps_true=DISTURBANCE_LEVELS[seed % 3])
        off = summarize(run_trial(scenario, filter_enabled=False, seed=seed))
        on = summarize(run_trial(scenario, filter_enabled=True, seed=seed))
        tolerance = 2.0 * scenario.map_config.resolution
        safe = on.h_min >= -tolerance
        all_safe &= safe
        print(f"{seed:>4} {scenario.model.eps_true:>8.2f} {off.n_c:>8d} "
              f"{off.h_min:>10.3f} {on.h_min:>10.3f} "
              f"{on.mean_correction:>8.3f} {on.d:>8.2f}"
              + ("" if safe else "  <-- UNSAFE"))
    print("all filtered runs stayed clear" if all_safe
          else "SOME FILTERED RUNS WENT UNSAFE")


if __name__ == "__main__":
    main()
