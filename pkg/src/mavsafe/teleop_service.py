"""Interactive teleoperation service over websockets.

The simulation advances in discrete ticks exactly like scripted trials; the
service layers a mailbox of operator inputs on top. Within a tick the last
received reference wins; absent input the previous reference is held, so
the loop never stalls waiting for a client.

``TeleopSession`` is the transport-free core: feed it wire messages, call
``tick()``, and read the same records a scripted run would produce. It is
driven in virtual time by tests and replays, and by the wall-clock loop in
``serve()`` for live operation.

Wire protocol (JSON, one object per websocket message):

Client to server:
  {"type": "set_reference", "x": float, "y": float, "z": float}
  {"type": "set_yaw", "yaw": float}
  {"type": "toggle_filter", "enabled": bool}
  {"type": "reset"}

Server to client:
  {"type": "telemetry", "k", "pose", "u_teleop", "u_filtered", "h_eff",
   "status", "metrics": {"d", "n_c", "h_min", "mean_correction"}}
  {"type": "map_slice", "axis", "coord", "col_axis", "row_axis", "origin",
   "resolution", "width", "height", "h_b", "values"}  (row-major)
  {"type": "scene", "primitives", "map", "start", "start_yaw", "h_b",
   "tick_hz"}

Unknown or malformed client messages are logged and ignored.
"""

from __future__ import annotations

import asyncio
import json
import logging
import math
import mimetypes
import pathlib
from http import HTTPStatus

import numpy as np

from mavsafe.harness import TrialLog, TrialRunner, summarize
from mavsafe.scenarios import Scenario, _primitive_to_dict
from mavsafe.tesdf import query, slice_values

logger = logging.getLogger(__name__)


def _finite_floats(values) -> bool:
    try:
        return all(math.isfinite(float(v)) for v in values)
    except (TypeError, ValueError):
        return False


class TeleopSession:
    """Tick-stepped interactive session around a single trial runner."""

    def __init__(self, scenario: Scenario, filter_enabled: bool = True,
                 seed: int | None = None):
        self.scenario = scenario
        self._initial_filter = filter_enabled
        self._seed = seed
        self.transcript: list = []
        # counts every tick ever run, across resets, so transcript entries
        # stay monotone and replay preserves receipt order
        self.total_ticks = 0
        self._start_runner()

    def _start_runner(self) -> None:
        self.runner = TrialRunner(self.scenario, filter_enabled=self._initial_filter,
                                  seed=self._seed)
        self.reference = np.asarray(self.scenario.start, dtype=float)
        self.yaw = self.scenario.start_yaw
        self.filter_enabled = self._initial_filter
        self._reset_pending = False

    @property
    def ticks(self) -> int:
        return self.runner.k

    def handle_raw(self, raw: str | bytes) -> None:
        try:
            message = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError):
            logger.warning("ignoring unparseable message")
            return
        self.handle_message(message)

    def handle_message(self, message) -> None:
        """Apply one client message; it takes effect at the next tick."""
        if not isinstance(message, dict):
            logger.warning("ignoring non-object message")
            return
        kind = message.get("type")
        if kind == "set_reference":
            coords = [message.get(a) for a in ("x", "y", "z")]
            if None in coords or not _finite_floats(coords):
                logger.warning("ignoring set_reference with bad coordinates")
                return
            self.reference = np.array([float(c) for c in coords])
        elif kind == "set_yaw":
            yaw = message.get("yaw")
            if yaw is None or not _finite_floats([yaw]):
                logger.warning("ignoring set_yaw with bad angle")
                return
            self.yaw = float(yaw)
        elif kind == "toggle_filter":
            self.filter_enabled = bool(message.get("enabled"))
        elif kind == "reset":
            self._reset_pending = True
        else:
            logger.warning("ignoring unknown message type %r", kind)
            return
        self.transcript.append({"tick": self.total_ticks, "message": message})

    def tick(self) -> dict:
        """Advance one period and return the telemetry message."""
        if self._reset_pending:
            self._start_runner()
        self.total_ticks += 1
        record = self.runner.tick(self.reference, camera_yaw=self.yaw,
                                  filter_enabled=self.filter_enabled)
        pose = self.runner.state.position
        h_here = query(self.runner.field, pose).value \
            - self.scenario.filter_params.robot_radius
        s = summarize(self.runner.log())
        return {
            "type": "telemetry",
            "k": record.k,
            "pose": [float(v) for v in pose],
            "u_teleop": [float(v) for v in record.u_teleop],
            "u_filtered": [float(v) for v in record.u_filtered],
            "h_eff": float(h_here),
            "status": record.status,
            "metrics": {
                "d": s.d,
                "n_c": s.n_c,
                "h_min": s.h_min,
                "mean_correction": s.mean_correction,
            },
        }

    def slice_message(self) -> dict | None:
        """Current distance-field slice, None before the first tick."""
        if self.runner.field is None:
            return None
        coord = self.scenario.slice_coord
        if coord is None:
            coord = float(self.runner.state.position[2])
        arr, meta = slice_values(self.runner.field, self.scenario.slice_axis, coord)
        return {
            "type": "map_slice",
            "axis": meta["axis"],
            "coord": float(meta["coord"]),
            "col_axis": meta["col_axis"],
            "row_axis": meta["row_axis"],
            "origin": [float(v) for v in meta["origin"]],
            "resolution": float(meta["resolution"]),
            "width": int(arr.shape[1]),
            "height": int(arr.shape[0]),
            "h_b": float(meta["h_b"]),
            "values": [float(v) for v in arr.ravel()],
        }

    def scene_message(self) -> dict:
        cfg = self.scenario.map_config
        return {
            "type": "scene",
            "primitives": [_primitive_to_dict(p) for p in self.scenario.scene.primitives],
            "map": {
                "origin": [float(v) for v in cfg.origin],
                "extent": [float(v) for v in cfg.extent],
                "resolution": float(cfg.resolution),
            },
            "start": [float(v) for v in self.scenario.start],
            "start_yaw": float(self.scenario.start_yaw),
            "h_b": float(self.scenario.h_b),
            "tick_hz": float(self.scenario.tick_hz),
        }


def session_record(session: TeleopSession) -> TrialLog:
    """The session's per-step log, identical in shape to scripted trials."""
    return session.runner.log()


def replay_transcript(scenario: Scenario, transcript, ticks: int,
                      filter_enabled: bool = True,
                      seed: int | None = None) -> TrialLog:
    """Re-run a recorded message transcript in virtual time.

    ``transcript`` is a list of {"tick": k, "message": {...}} entries; each
    message is applied before tick k executes, mirroring live receipt order.
    """
    session = TeleopSession(scenario, filter_enabled=filter_enabled, seed=seed)
    pending = sorted(transcript, key=lambda e: e["tick"])
    i = 0
    for k in range(ticks):
        while i < len(pending) and pending[i]["tick"] <= k:
            session.handle_message(pending[i]["message"])
            i += 1
        session.tick()
    return session_record(session)


async def serve_async(scenario: Scenario, host: str = "127.0.0.1",
                      port: int = 8765, ui_dir=None, *,
                      started: "asyncio.Future | None" = None):
    """Run the wall-clock session loop and its websocket endpoint forever.

    With ``ui_dir`` set, "/" and the directory's static files are served
    over plain HTTP so the browser client shares the websocket's origin.
    """
    from websockets.asyncio.server import broadcast, serve as ws_serve

    session = TeleopSession(scenario)
    clients: set = set()
    static_root = None if ui_dir is None else pathlib.Path(ui_dir).resolve()

    def static_response(connection, path):
        rel = "index.html" if path == "/" else path.lstrip("/")
        target = (static_root / rel).resolve()
        if not target.is_relative_to(static_root) or not target.is_file():
            return connection.respond(HTTPStatus.NOT_FOUND, "unknown path\n")
        content_type = mimetypes.guess_type(target.name)[0] or "text/plain"
        response = connection.respond(HTTPStatus.OK,
                                      target.read_text(encoding="utf-8"))
        # Headers is a multidict and __setitem__ appends, so drop the
        # default Content-Type before setting the real one
        del response.headers["Content-Type"]
        response.headers["Content-Type"] = content_type
        return response

    async def handler(ws):
        clients.add(ws)
        try:
            await ws.send(json.dumps(session.scene_message()))
            sl = session.slice_message()
            if sl is not None:
                await ws.send(json.dumps(sl))
            async for raw in ws:
                session.handle_raw(raw)
        finally:
            clients.discard(ws)

    def process_request(connection, request):
        path = request.path.split("?", 1)[0]
        if path == "/scene":
            response = connection.respond(HTTPStatus.OK,
                                          json.dumps(session.scene_message()))
            del response.headers["Content-Type"]
            response.headers["Content-Type"] = "application/json"
            return response
        if path == "/ws":
            return None
        if static_root is not None:
            return static_response(connection, path)
        return connection.respond(HTTPStatus.NOT_FOUND, "unknown path\n")

    async with ws_serve(handler, host, port, process_request=process_request) as server:
        bound = ", ".join(str(s.getsockname()[1]) for s in server.sockets)
        logger.info("serving on %s port %s", host, bound)
        if started is not None and not started.done():
            started.set_result(server)
        period = 1.0 / scenario.tick_hz
        slice_every = max(1, round(scenario.tick_hz / scenario.slice_hz))
        loop = asyncio.get_running_loop()
        next_tick = loop.time()
        while True:
            telemetry = session.tick()
            broadcast(clients, json.dumps(telemetry))
            if (session.ticks - 1) % slice_every == 0:
                sl = session.slice_message()
                if sl is not None:
                    broadcast(clients, json.dumps(sl))
            next_tick += period
            await asyncio.sleep(max(0.0, next_tick - loop.time()))


def serve(scenario: Scenario, host: str = "127.0.0.1", port: int = 8765,
          ui_dir=None) -> None:
    """Blocking entry point used by the CLI."""
    asyncio.run(serve_async(scenario, host=host, port=port, ui_dir=ui_dir))
