"""Safe teleoperation stack for a simulated MAV.

Pipeline: a depth-camera simulator feeds a probabilistic voxel occupancy
map, from which a truncated Euclidean signed distance field is rebuilt
online; a discrete-time control-barrier safety filter minimally corrects
operator position references so the vehicle stays inside mapped free
space.
"""

from mavsafe.grid_map import (
    MapConfig,
    OccupancyGrid,
    OutOfVolumeError,
    VoxelClass,
    classify,
    integrate_depth_frame,
    load_grid,
    save_grid,
)
from mavsafe.harness import (
    ScenarioError,
    StepRecord,
    TrialLog,
    TrialRunner,
    TrialSummary,
    export_csv,
    export_slice,
    read_csv,
    run_trial,
    summarize,
)
from mavsafe.mav_model import ClosedLoopModel, MavState, estimate, step
from mavsafe.safety_filter import (
    CbfConstraint,
    FilterParams,
    FilterResult,
    FilterStatus,
    build_constraint,
    filter_qp_oracle,
    filter_reference,
)
from mavsafe.scenarios import (
    ModelSpec,
    Scenario,
    TeleopScript,
    WarmupSweep,
    Waypoint,
    load_scenario,
    save_scenario,
)
from mavsafe.sensor_sim import (
    Box,
    CameraIntrinsics,
    CameraRig,
    DepthFrame,
    GroundPlane,
    Scene,
    Sphere,
    contains,
    ray_hit,
    render_depth,
)
from mavsafe.tesdf import (
    TesdfField,
    TesdfQuery,
    brute_force_esdf,
    build_tesdf,
    query,
)

__all__ = [
    "Box",
    "CameraIntrinsics",
    "CameraRig",
    "CbfConstraint",
    "ClosedLoopModel",
    "DepthFrame",
    "FilterParams",
    "FilterResult",
    "FilterStatus",
    "GroundPlane",
    "MapConfig",
    "MavState",
    "ModelSpec",
    "OccupancyGrid",
    "OutOfVolumeError",
    "Scenario",
    "ScenarioError",
    "Scene",
    "Sphere",
    "StepRecord",
    "TeleopScript",
    "TesdfField",
    "TesdfQuery",
    "TrialLog",
    "TrialRunner",
    "TrialSummary",
    "VoxelClass",
    "WarmupSweep",
    "Waypoint",
    "brute_force_esdf",
    "build_constraint",
    "build_tesdf",
    "classify",
    "contains",
    "estimate",
    "export_csv",
    "export_slice",
    "filter_qp_oracle",
    "filter_reference",
    "integrate_depth_frame",
    "load_grid",
    "load_scenario",
    "query",
    "ray_hit",
    "read_csv",
    "render_depth",
    "run_trial",
    "save_grid",
    "save_scenario",
    "step",
    "summarize",
]
