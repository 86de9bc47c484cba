"""Trial loop: sensor, map, distance field, filter, and model in lockstep.

Each filter period runs render -> integrate -> rebuild field -> estimate ->
read reference -> filter (or bypass) -> step, appending one record. The
first period additionally plays the warm-up camera sweep and enforces the
start contract: the start voxel must be Free after the first integration,
otherwise the trial aborts.

Logs are plain records; ``summarize`` reduces them to the trial metrics
(distance traversed, unsafe step count, minimum clearance, mean
correction). CSV export writes floats with ``repr`` so identical runs
produce byte-identical files.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from mavsafe.grid_map import (
    MapConfig,
    OccupancyGrid,
    OutOfVolumeError,
    VoxelClass,
    classify,
    integrate_depth_frame,
)
from mavsafe.mav_model import ClosedLoopModel, MavState, estimate, step
from mavsafe.safety_filter import build_constraint, filter_reference
from mavsafe.scenarios import Scenario
from mavsafe.sensor_sim import render_depth
from mavsafe.tesdf import TesdfField, build_tesdf, export_slice_csv, query
from mavsafe.transforms import camera_pose

BYPASSED = "bypassed"


class ScenarioError(RuntimeError):
    """The scenario violates a run-time contract (e.g. warm-up)."""


@dataclass(frozen=True)
class StepRecord:
    k: int
    x: np.ndarray
    u_teleop: np.ndarray
    u_filtered: np.ndarray
    h_eff: float
    status: str
    next_voxel_class: str


@dataclass
class TrialLog:
    records: list
    h_b: float


@dataclass(frozen=True)
class TrialSummary:
    d: float
    n_c: int
    h_min: float
    mean_correction: float


class TrialRunner:
    """Owns all mutable trial state; one instance per trial."""

    def __init__(self, scenario: Scenario, filter_enabled: bool = True,
                 seed: int | None = None):
        self.scenario = scenario
        self.filter_enabled = filter_enabled
        run_seed = scenario.seed if seed is None else seed
        model_seq, sensor_seq = np.random.SeedSequence(run_seed).spawn(2)
        model_seed = model_seq if scenario.model.seed is None else scenario.model.seed
        self.model = ClosedLoopModel(
            A=np.asarray(scenario.model.A, dtype=float),
            B=np.asarray(scenario.model.B, dtype=float),
            eps_true=scenario.model.eps_true,
            step_dt=scenario.model.step_dt,
            seed=model_seed,
        )
        self.sensor_rng = np.random.default_rng(sensor_seq)
        self.grid = OccupancyGrid(scenario.map_config)
        self.state = MavState(position=np.asarray(scenario.start, dtype=float), k=0)
        self.field: TesdfField | None = None
        self.records: list = []
        self.k = 0

    def observe(self, yaw: float, pitch: float = 0.0) -> None:
        """Render one frame at the current position and fuse it into the map."""
        pose = camera_pose(self.state.position, yaw, pitch,
                           rig=self.scenario.rig.body_from_optical)
        frame = render_depth(self.scenario.scene, pose, self.scenario.camera,
                             noise_sigma=self.scenario.sensor_sigma,
                             rng=self.sensor_rng if self.scenario.sensor_sigma > 0 else None)
        integrate_depth_frame(self.grid, frame, pose)

    def _observe_for_step(self, yaw: float) -> None:
        if self.k == 0 and self.scenario.warmup is not None:
            for sweep_yaw, pitch in self.scenario.warmup.poses(self.scenario.start_yaw):
                self.observe(sweep_yaw, pitch)
        else:
            self.observe(yaw)
        if self.k == 0:
            try:
                start_class = classify(self.grid, self.scenario.start)
            except OutOfVolumeError as e:
                raise ScenarioError(f"start position outside the map volume: {e}") from e
            if start_class is not VoxelClass.FREE:
                raise ScenarioError(
                    "warm-up contract violated: start voxel is "
                    f"{start_class.name} after the first integration"
                )

    def tick(self, u_teleop, camera_yaw: float | None = None,
             filter_enabled: bool | None = None) -> StepRecord:
        """Run one filter period under reference ``u_teleop``."""
        yaw = self.scenario.start_yaw if camera_yaw is None else camera_yaw
        enabled = self.filter_enabled if filter_enabled is None else filter_enabled
        u_teleop = np.asarray(u_teleop, dtype=float)

        self._observe_for_step(yaw)
        self.field = build_tesdf(self.grid.snapshot(), h_b=self.scenario.h_b)
        x_est = estimate(self.model, self.state, self.scenario.est_sigma)

        # clamp the raw reference to a stick-scale offset around the
        # estimate: the linearized constraint has no authority over
        # commands far from the vehicle, and scripted references keep
        # marching while the filter holds the vehicle back
        offset = u_teleop - x_est
        gap = float(np.linalg.norm(offset))
        limit = self.scenario.max_ref_offset
        if gap > limit:
            u_teleop = x_est + offset * (limit / gap)

        if enabled:
            constraint = build_constraint(x_est, self.field, self.model,
                                          self.scenario.filter_params)
            result = filter_reference(u_teleop, constraint, self.scenario.filter_params)
            u_filtered = result.u_filtered
            status = result.status.value
        else:
            u_filtered = u_teleop.copy()
            status = BYPASSED

        h_eff = query(self.field, self.state.position).value \
            - self.scenario.filter_params.robot_radius
        x_before = self.state.position.copy()
        self.state = step(self.model, self.state, u_filtered)
        try:
            next_class = classify(self.grid, self.state.position).name.lower()
        except OutOfVolumeError:
            next_class = "outside"

        record = StepRecord(k=self.k, x=x_before, u_teleop=u_teleop.copy(),
                            u_filtered=np.asarray(u_filtered, dtype=float).copy(),
                            h_eff=float(h_eff), status=status,
                            next_voxel_class=next_class)
        self.records.append(record)
        self.k += 1
        return record

    def run(self) -> TrialLog:
        """Play the scripted reference stream to completion."""
        script = self.scenario.teleop
        if script is None:
            raise ValueError("interactive scenario: drive it through the service")
        for k in range(self.scenario.steps):
            u_teleop, yaw = script.reference_at(
                k, default_position=self.scenario.start,
                default_yaw=self.scenario.start_yaw)
            self.tick(u_teleop, camera_yaw=yaw)
        return self.log()

    def log(self) -> TrialLog:
        return TrialLog(records=list(self.records), h_b=self.scenario.h_b)


def run_trial(scenario: Scenario, filter_enabled: bool = True,
              seed: int | None = None) -> TrialLog:
    return TrialRunner(scenario, filter_enabled=filter_enabled, seed=seed).run()


def summarize(log: TrialLog) -> TrialSummary:
    """Reduce a log to the trial metrics; an empty log is all-neutral."""
    if not log.records:
        return TrialSummary(d=0.0, n_c=0, h_min=log.h_b, mean_correction=0.0)
    xs = np.stack([r.x for r in log.records])
    h = np.array([r.h_eff for r in log.records])
    corrections = np.stack([r.u_filtered - r.u_teleop for r in log.records])
    d = float(np.sum(np.linalg.norm(np.diff(xs, axis=0), axis=1)))
    return TrialSummary(
        d=d,
        n_c=int(np.sum(h < 0.0)),
        h_min=float(h.min()),
        mean_correction=float(np.mean(np.linalg.norm(corrections, axis=1))),
    )


_CSV_COLUMNS = ("k,x0,x1,x2,ut0,ut1,ut2,uf0,uf1,uf2,h_eff,status,"
                "next_voxel_class")


def write_csv(log: TrialLog, stream: io.TextIOBase) -> None:
    stream.write(f"# h_b={log.h_b!r}\n")
    stream.write(_CSV_COLUMNS + "\n")
    for r in log.records:
        fields = [str(r.k)]
        fields += [repr(float(v)) for v in r.x]
        fields += [repr(float(v)) for v in r.u_teleop]
        fields += [repr(float(v)) for v in r.u_filtered]
        fields.append(repr(float(r.h_eff)))
        fields.append(r.status)
        fields.append(r.next_voxel_class)
        stream.write(",".join(fields) + "\n")


def export_csv(log: TrialLog, path) -> None:
    """Per-step CSV; floats are written with repr so reruns are comparable
    byte for byte."""
    with open(path, "w", newline="") as f:
        write_csv(log, f)


def read_csv(path) -> TrialLog:
    """Inverse of export_csv."""
    h_b = 0.5
    records = []
    with open(path, newline="") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                if key.strip() == "h_b":
                    h_b = float(value)
                continue
            if line == _CSV_COLUMNS:
                continue
            parts = line.split(",")
            if len(parts) != 13:
                raise ValueError(f"malformed log row: {line!r}")
            records.append(StepRecord(
                k=int(parts[0]),
                x=np.array([float(v) for v in parts[1:4]]),
                u_teleop=np.array([float(v) for v in parts[4:7]]),
                u_filtered=np.array([float(v) for v in parts[7:10]]),
                h_eff=float(parts[10]),
                status=parts[11],
                next_voxel_class=parts[12],
            ))
    return TrialLog(records=records, h_b=h_b)


def export_slice(field: TesdfField, axis: str, coord: float, path) -> None:
    """Distance-field slice CSV; see the field module for the layout."""
    export_slice_csv(field, axis, coord, path)
