import asyncio
import json
import math
import urllib.error
import urllib.request
from contextlib import suppress

import numpy as np
import pytest

from mavsafe.grid_map import MapConfig
from mavsafe.harness import export_csv
from mavsafe.scenarios import Scenario
from mavsafe.sensor_sim import Box, CameraIntrinsics, Scene
from mavsafe.teleop_service import (
    TeleopSession,
    replay_transcript,
    serve_async,
    session_record,
)

TELEMETRY_KEYS = {"type", "k", "pose", "u_teleop", "u_filtered", "h_eff",
                  "status", "metrics"}


def interactive_scenario(primitives=(), extent=(4.0, 3.0, 2.0),
                         start=(1.0, 1.5, 1.0), **overrides):
    kwargs = dict(
        name="interactive",
        scene=Scene(tuple(primitives)),
        map_config=MapConfig(extent=extent, resolution=0.1),
        teleop=None,
        start=start,
        steps=50,
        camera=CameraIntrinsics.fov90(32, 24),
    )
    kwargs.update(overrides)
    return Scenario(**kwargs)


def walled_scenario(**overrides):
    wall = Box(center=(2.5, 1.5, 1.0), size=(0.2, 3.0, 2.0))
    return interactive_scenario(primitives=(wall,), **overrides)


def run_ticks(session, n):
    return [session.tick() for _ in range(n)]


def test_no_client_holds_position():
    session = TeleopSession(interactive_scenario(), seed=1)
    frames = run_ticks(session, 5)
    for i, t in enumerate(frames):
        assert t["type"] == "telemetry"
        assert t["k"] == i
        assert t["pose"] == pytest.approx([1.0, 1.5, 1.0])
        assert t["status"] == "pass_through"
    assert frames[-1]["metrics"]["d"] == pytest.approx(0.0)


def test_reference_moves_vehicle_and_pose_matches_filtered_output():
    session = TeleopSession(interactive_scenario(), seed=1)
    session.handle_message({"type": "set_reference", "x": 1.2, "y": 1.6, "z": 1.0})
    t = session.tick()
    # default model tracks exactly, so one tick lands on the filtered output
    assert t["pose"] == t["u_filtered"]
    assert t["pose"] == pytest.approx([1.2, 1.6, 1.0])
    assert t["u_teleop"] == pytest.approx([1.2, 1.6, 1.0])


def test_wall_reference_is_projected_and_never_crossed():
    session = TeleopSession(walled_scenario(), seed=2)
    session.handle_message({"type": "set_reference", "x": 3.4, "y": 1.5, "z": 1.0})
    frames = run_ticks(session, 20)
    assert any(t["status"] == "projected" for t in frames)
    final = frames[-1]
    assert final["pose"][0] < 2.2
    assert final["metrics"]["n_c"] == 0
    assert final["metrics"]["h_min"] > 0.0
    assert final["metrics"]["mean_correction"] > 0.0


def test_toggle_filter_lets_raw_reference_through():
    session = TeleopSession(walled_scenario(), seed=2)
    session.handle_message({"type": "set_reference", "x": 3.4, "y": 1.5, "z": 1.0})
    run_ticks(session, 12)
    session.handle_message({"type": "toggle_filter", "enabled": False})
    frames = run_ticks(session, 12)
    assert all(t["status"] == "bypassed" for t in frames)
    assert frames[-1]["pose"][0] > 2.6
    assert frames[-1]["metrics"]["n_c"] > 0

    session.handle_message({"type": "toggle_filter", "enabled": True})
    assert session.tick()["status"] != "bypassed"


def test_last_reference_in_a_tick_wins():
    session = TeleopSession(interactive_scenario(), seed=1)
    session.handle_message({"type": "set_reference", "x": 1.2, "y": 1.5, "z": 1.0})
    session.handle_message({"type": "set_reference", "x": 1.0, "y": 1.3, "z": 1.0})
    t = session.tick()
    assert t["pose"] == pytest.approx([1.0, 1.3, 1.0])


def test_reset_restarts_the_trial():
    session = TeleopSession(interactive_scenario(), seed=1)
    session.handle_message({"type": "set_reference", "x": 1.2, "y": 1.6, "z": 1.0})
    run_ticks(session, 3)
    session.handle_message({"type": "reset"})
    t = session.tick()
    assert t["k"] == 0
    assert t["pose"] == pytest.approx([1.0, 1.5, 1.0])
    # the held reference is also back at the start
    assert t["u_teleop"] == pytest.approx([1.0, 1.5, 1.0])


def test_malformed_messages_are_ignored():
    session = TeleopSession(interactive_scenario(), seed=1)
    session.handle_raw(b"\xff\xfe")
    session.handle_raw("not json at all")
    session.handle_raw('"just a string"')
    session.handle_message(["not", "a", "dict"])
    session.handle_message({"type": "bogus_kind"})
    session.handle_message({"type": "set_reference", "x": 1.0, "y": 2.0})
    session.handle_message({"type": "set_reference", "x": 1.0, "y": 2.0,
                            "z": float("nan")})
    session.handle_message({"type": "set_reference", "x": 1.0, "y": "abc",
                            "z": 1.0})
    session.handle_message({"type": "set_yaw"})
    session.handle_message({"type": "set_yaw", "yaw": float("inf")})
    assert session.transcript == []
    assert session.reference == pytest.approx([1.0, 1.5, 1.0])
    assert session.tick()["pose"] == pytest.approx([1.0, 1.5, 1.0])


def test_yaw_and_truthy_toggle_are_recorded():
    session = TeleopSession(interactive_scenario(), seed=1)
    session.handle_message({"type": "set_yaw", "yaw": math.pi / 2.0})
    session.handle_message({"type": "toggle_filter", "enabled": 1})
    assert session.yaw == pytest.approx(math.pi / 2.0)
    assert session.filter_enabled is True
    assert [e["message"]["type"] for e in session.transcript] == \
        ["set_yaw", "toggle_filter"]


def test_transcript_replay_reproduces_the_run_byte_for_byte(tmp_path):
    scenario = walled_scenario()
    session = TeleopSession(scenario, seed=7)

    plan = {
        0: [{"type": "set_reference", "x": 3.0, "y": 1.5, "z": 1.0}],
        4: [{"type": "set_yaw", "yaw": 0.4}],
        6: [{"type": "toggle_filter", "enabled": False}],
        8: [{"type": "toggle_filter", "enabled": True}],
        10: [{"type": "reset"}],
        11: [{"type": "set_reference", "x": 1.4, "y": 2.0, "z": 1.2},
             {"type": "set_reference", "x": 1.3, "y": 1.0, "z": 0.9}],
    }
    total = 16
    for k in range(total):
        for message in plan.get(k, ()):
            session.handle_message(message)
        session.tick()

    live = session_record(session)
    replayed = replay_transcript(scenario, session.transcript, ticks=total,
                                 seed=7)
    a, b = tmp_path / "live.csv", tmp_path / "replay.csv"
    export_csv(live, a)
    export_csv(replayed, b)
    assert a.read_bytes() == b.read_bytes()
    # the reset mid-run means only the restarted portion remains logged
    assert live.records[0].k == 0
    assert len(live.records) == total - 10


def test_scene_and_slice_messages():
    session = TeleopSession(walled_scenario(), seed=3)
    scene = session.scene_message()
    assert scene["type"] == "scene"
    assert scene["map"]["resolution"] == pytest.approx(0.1)
    assert scene["start"] == pytest.approx([1.0, 1.5, 1.0])
    assert len(scene["primitives"]) == 1
    assert scene["primitives"][0]["type"] == "box"
    assert scene["tick_hz"] > 0

    assert session.slice_message() is None
    session.tick()
    sl = session.slice_message()
    assert sl["type"] == "map_slice"
    assert sl["axis"] == "z"
    assert len(sl["values"]) == sl["width"] * sl["height"]
    assert sl["width"] == 40 and sl["height"] == 30
    assert all(abs(v) <= sl["h_b"] + 1e-9 for v in sl["values"])
    # everything is JSON-serializable as-is
    json.dumps(sl)
    json.dumps(scene)
    json.dumps(session.tick())


def test_telemetry_h_eff_tracks_the_new_pose():
    session = TeleopSession(interactive_scenario(), seed=1)
    t = session.tick()
    # open space around the start: clearance capped by the truncation bound
    assert t["h_eff"] == pytest.approx(0.5 - 0.3, abs=0.12)
    assert isinstance(t["metrics"]["n_c"], int)


def test_websocket_server_round_trip():
    scenario = interactive_scenario(camera=CameraIntrinsics.fov90(16, 12))

    async def flow():
        loop = asyncio.get_running_loop()
        started = loop.create_future()
        task = asyncio.create_task(serve_async(scenario, port=0, started=started))
        try:
            server = await asyncio.wait_for(started, 15)
            port = next(iter(server.sockets)).getsockname()[1]

            import websockets

            async with websockets.connect(f"ws://127.0.0.1:{port}/ws") as ws:
                first = json.loads(await asyncio.wait_for(ws.recv(), 15))
                assert first["type"] == "scene"
                await ws.send(json.dumps(
                    {"type": "set_reference", "x": 1.1, "y": 1.5, "z": 1.0}))
                seen = set()
                telemetry = None
                for _ in range(30):
                    msg = json.loads(await asyncio.wait_for(ws.recv(), 15))
                    seen.add(msg["type"])
                    if msg["type"] == "telemetry":
                        telemetry = msg
                        if msg["k"] >= 2:
                            break
                assert "telemetry" in seen and "map_slice" in seen
                assert TELEMETRY_KEYS <= set(telemetry)
                assert telemetry["pose"] == pytest.approx([1.1, 1.5, 1.0])

            def fetch_scene():
                with urllib.request.urlopen(
                        f"http://127.0.0.1:{port}/scene", timeout=15) as r:
                    return json.loads(r.read())

            scene = await asyncio.to_thread(fetch_scene)
            assert scene["type"] == "scene"
            assert scene["start"] == pytest.approx([1.0, 1.5, 1.0])

            def fetch_missing():
                try:
                    urllib.request.urlopen(
                        f"http://127.0.0.1:{port}/nope", timeout=15)
                except urllib.error.HTTPError as e:
                    return e.code
                return None

            assert await asyncio.to_thread(fetch_missing) == 404
        finally:
            task.cancel()
            with suppress(asyncio.CancelledError):
                await task

    asyncio.run(flow())


def test_server_optionally_serves_static_client_files(tmp_path):
    scenario = interactive_scenario(camera=CameraIntrinsics.fov90(16, 12))
    (tmp_path / "index.html").write_text("<canvas id='view'></canvas>")
    (tmp_path / "dist").mkdir()
    (tmp_path / "dist" / "main.js").write_text("export {};")
    (tmp_path / "secret.txt").write_text("keep out")

    async def flow():
        loop = asyncio.get_running_loop()
        started = loop.create_future()
        task = asyncio.create_task(
            serve_async(scenario, port=0, ui_dir=tmp_path, started=started))
        try:
            server = await asyncio.wait_for(started, 15)
            port = next(iter(server.sockets)).getsockname()[1]

            def fetch(path):
                try:
                    with urllib.request.urlopen(
                            f"http://127.0.0.1:{port}{path}", timeout=15) as r:
                        return r.status, r.headers.get("Content-Type"), r.read()
                except urllib.error.HTTPError as e:
                    return e.code, None, b""

            status, ctype, body = await asyncio.to_thread(fetch, "/")
            assert status == 200 and ctype == "text/html"
            assert b"canvas" in body

            status, ctype, _ = await asyncio.to_thread(fetch, "/dist/main.js")
            assert status == 200 and ctype == "text/javascript"

            # traversal outside the directory and dotted paths stay hidden
            status, _, _ = await asyncio.to_thread(fetch, "/dist/../secret.txt")
            assert status in (200, 404)  # urllib collapses the path itself
            status, _, _ = await asyncio.to_thread(fetch, "/%2e%2e/secret.txt")
            assert status == 404

            status, _, _ = await asyncio.to_thread(fetch, "/missing.js")
            assert status == 404
        finally:
            task.cancel()
            with suppress(asyncio.CancelledError):
                await task

    asyncio.run(flow())
