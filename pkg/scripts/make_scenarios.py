"""Regenerate the demo scenario files under scenarios/.

The JSON files are committed so the CLI examples in the README work out of
the box; rerun this script after changing the scenario factories.
"""

import pathlib

from mavsafe.scenarios import (
    Scenario,
    backward_into_unknown_scenario,
    open_space_scenario,
    save_scenario,
    wall_crossing_scenario,
)
from mavsafe.grid_map import MapConfig
from mavsafe.sensor_sim import Box, CameraIntrinsics, Scene, Sphere


def interactive_room() -> Scenario:
    """Small cluttered room for live flying; no script, filter on."""
    extent = (5.0, 4.0, 2.5)
    scene = Scene((
        Box(center=(3.2, 1.0, 1.25), size=(0.4, 2.0, 2.5)),
        Box(center=(1.8, 3.2, 0.6), size=(0.8, 0.8, 1.2)),
        Sphere(center=(3.8, 3.0, 1.3), radius=0.45),
    ))
    return Scenario(
        name="interactive_room",
        scene=scene,
        map_config=MapConfig(extent=extent, resolution=0.1),
        teleop=None,
        start=(1.0, 1.5, 1.2),
        steps=100000,
        camera=CameraIntrinsics.fov90(64, 48),
    )


def main() -> None:
    out = pathlib.Path(__file__).resolve().parents[1] / "scenarios"
    out.mkdir(exist_ok=True)
    save_scenario(wall_crossing_scenario(seed=1, eps_true=0.05),
                  out / "wall_crossing.json")
    save_scenario(backward_into_unknown_scenario(),
                  out / "backward_into_unknown.json")
    save_scenario(open_space_scenario(), out / "open_space.json")
    save_scenario(interactive_room(), out / "interactive_room.json")
    for p in sorted(out.glob("*.json")):
        print(p.relative_to(out.parent))


if __name__ == "__main__":
    main()
