"""Command line entry points.

Subcommands:

* ``run``: execute a scripted scenario, print the summary metrics, and
  optionally export the per-step CSV log.
* ``slice``: execute the scenario, then export a 2D CSV slice of the final
  distance field.
* ``serve``: host the scenario as an interactive websocket session.

All subcommands exit non-zero when the scenario aborts (e.g. the warm-up
contract is violated).
"""

from __future__ import annotations

import argparse
import sys

from mavsafe.harness import ScenarioError, TrialRunner, export_csv, export_slice, summarize
from mavsafe.scenarios import load_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mavsafe",
                                     description="Safe MAV teleoperation sandbox")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scripted scenario")
    run.add_argument("--scenario", required=True, help="scenario JSON file")
    run.add_argument("--filter", choices=("on", "off"), default="on")
    run.add_argument("--seed", type=int, default=None,
                     help="override the scenario seed")
    run.add_argument("--out", default=None, help="per-step CSV output path")

    sl = sub.add_parser("slice", help="export a distance-field slice")
    sl.add_argument("--scenario", required=True, help="scenario JSON file")
    sl.add_argument("--axis", choices=("x", "y", "z"), default="z")
    sl.add_argument("--coord", type=float, required=True,
                    help="world coordinate of the slicing plane")
    sl.add_argument("--seed", type=int, default=None)
    sl.add_argument("--out", required=True, help="slice CSV output path")

    sv = sub.add_parser("serve", help="serve an interactive session")
    sv.add_argument("--scenario", required=True, help="scenario JSON file")
    sv.add_argument("--port", type=int, default=8765)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--ui", default=None, metavar="DIR",
                    help="also serve the browser client from this directory")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            scenario = load_scenario(args.scenario)
            runner = TrialRunner(scenario, filter_enabled=args.filter == "on",
                                 seed=args.seed)
            log = runner.run()
            if args.out:
                export_csv(log, args.out)
            s = summarize(log)
            print(f"{scenario.name}: steps={len(log.records)} d={s.d:.3f} "
                  f"N_c={s.n_c} h_min={s.h_min:.3f} "
                  f"mean_correction={s.mean_correction:.4f}")
            return 0

        if args.command == "slice":
            scenario = load_scenario(args.scenario)
            runner = TrialRunner(scenario, seed=args.seed)
            runner.run()
            export_slice(runner.field, args.axis, args.coord, args.out)
            print(f"wrote {args.axis}={args.coord} slice to {args.out}")
            return 0

        if args.command == "serve":
            from mavsafe.teleop_service import serve

            scenario = load_scenario(args.scenario)
            serve(scenario, host=args.host, port=args.port, ui_dir=args.ui)
            return 0
    except ScenarioError as e:
        print(f"scenario aborted: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as e:
        print(f"cannot load scenario: {e}", file=sys.stderr)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
