"""Acceptance suite: one test per release criterion, each printing a
PASS line (run with ``pytest tests/test_acceptance.py -v -s``).
"""

import math
import random
import time
from dataclasses import replace

import numpy as np
import pytest

from roversim import protocol
from roversim.autonomy import Mode, Phase
from roversim.config import ServiceConfig
from roversim.hardware import DriveState, PowerConfig
from roversim.protocol import (
    CmdCamera,
    CmdDrive,
    CmdMode,
    CmdRecord,
    DecodeError,
    Event,
    Telemetry,
    VideoFrame,
    decode,
    encode,
)
from roversim.sensing import (
    CameraConfig,
    GimbalState,
    UltrasonicConfig,
    echo_to_distance,
    frame_to_pgm,
    read_ultrasonic,
    render_frame,
)
from roversim.service import Simulation, parse_script, run_headless
from roversim.session import read_session
from roversim.world import ChassisConfig, Pose, Rect, World, step_kinematics

PASS = "ACCEPTANCE PASS:"


def _world(*rects, bounds=(20, 20)):
    return World(Rect(0, 0, *bounds), tuple(Rect(*r) for r in rects))


# ----------------------------------------------------------- determinism

def test_determinism_byte_identical_logs(tmp_path):
    script = parse_script(
        "\n".join(
            [
                "0 " + encode(CmdMode(1)).hex(),
                "600 " + encode(CmdCamera(90, 5)).hex(),
                "1200 " + encode(CmdRecord(2)).hex(),
                "2000 " + encode(CmdMode(0)).hex(),
                "2001 " + encode(CmdDrive(40, -10)).hex(),
                "3000 " + encode(CmdDrive(0, 0)).hex(),
                "3500 " + encode(CmdMode(1)).hex(),
            ]
        )
    )
    world = _world((14, 8, 1, 4), (5, 3, 2, 1), (9, 14, 3, 1))
    started = time.perf_counter()
    blobs = []
    snaps = []
    for run in range(2):
        rec = tmp_path / f"run{run}"
        cfg = ServiceConfig(seed=42, record_dir=str(rec))
        cfg = replace(cfg, ultrasonic=replace(cfg.ultrasonic, noise_sigma=0.02))
        sim = Simulation(cfg, world)
        run_headless(sim, 5000, script)
        sim.close()
        blobs.append((rec / "session_0.woslog").read_bytes())
        snaps.append(sorted(p.read_bytes() for p in rec.glob("snap_*.pgm")))
    elapsed = time.perf_counter() - started

    assert blobs[0] == blobs[1]
    assert len(blobs[0]) > 8
    assert snaps[0] == snaps[1] and len(snaps[0]) == 1
    assert elapsed < 5.0, f"determinism runs took {elapsed:.2f}s"
    print(f"{PASS} determinism (5000-tick logs identical, {elapsed:.2f}s)")


# --------------------------------------------------- flowchart conformance

def test_flowchart_conformance_corridor():
    # wall dead ahead; open space up and to the left of it
    world = _world((6.0, 9.0, 0.5, 1.05))
    cfg = ServiceConfig(mode=Mode.AUTO, start_x=2.0, start_y=10.0)
    sim = Simulation(cfg, world)

    phases = [sim.autonomy_state.phase]
    stop_reading = None
    resumed = False
    for _ in range(1500):
        sim.step()
        phase = sim.autonomy_state.phase
        if phase != phases[-1]:
            if phase == Phase.AVOID_STOP and stop_reading is None:
                stop_reading = sim.last_reading.range_m
            phases.append(phase)
            if stop_reading is not None and phase == Phase.FORWARD:
                resumed = True
                break

    assert resumed, f"rover never resumed FORWARD; phases: {phases}"
    assert phases == [Phase.FORWARD, Phase.AVOID_STOP, Phase.TURN_LEFT, Phase.FORWARD]

    params = cfg.autonomy
    quantum = cfg.ultrasonic.quantum
    assert stop_reading is not None
    assert stop_reading >= params.stop_distance - quantum - 1e-9
    assert stop_reading < params.stop_distance
    print(
        f"{PASS} flowchart conformance (stopped at {stop_reading:.2f} m, "
        f"phases {' -> '.join(p.name for p in phases)})"
    )


# ------------------------------------------------------- collision freedom

def _random_world(seed: int) -> World:
    rng = random.Random(seed)
    rects = []
    target = rng.randint(10, 30)
    while len(rects) < target:
        w = rng.uniform(0.3, 2.0)
        h = rng.uniform(0.3, 2.0)
        x = rng.uniform(0.0, 20.0 - w)
        y = rng.uniform(0.0, 20.0 - h)
        # keep the spawn area clear
        cx = min(max(10.0, x), x + w)
        cy = min(max(10.0, y), y + h)
        if math.hypot(cx - 10.0, cy - 10.0) < 1.2:
            continue
        rects.append(Rect(x, y, w, h))
    return World(Rect(0, 0, 20, 20), tuple(rects))


def test_collision_freedom_across_random_worlds():
    started = time.perf_counter()
    for seed in range(1, 6):
        world = _random_world(seed)
        sim = Simulation(ServiceConfig(mode=Mode.AUTO, seed=seed), world)
        collisions = []
        for _ in range(10_000):
            for m in sim.step():
                if isinstance(m, Event) and m.code == protocol.EV_COLLISION:
                    collisions.append((seed, sim.tick_index))
        assert not collisions, f"collisions: {collisions[:5]}"
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"collision sweep took {elapsed:.2f}s"
    print(f"{PASS} collision freedom (5 worlds x 10k AUTO ticks, {elapsed:.2f}s)")


# -------------------------------------------------------- kinematics oracle

def _fine_reference(v, steer, wheelbase, dt, total_time):
    n = round(total_time / dt)
    x = y = heading = 0.0
    omega = v * math.tan(steer) / wheelbase
    points = [(x, y)]
    for _ in range(n):
        x += v * math.cos(heading) * dt
        y += v * math.sin(heading) * dt
        heading += omega * dt
        points.append((x, y))
    return points


def _max_distance_to_polyline(points, poly):
    arr = np.asarray(poly)
    a, b = arr[:-1], arr[1:]
    ab = b - a
    ab2 = (ab * ab).sum(axis=1)
    worst = 0.0
    for p in points:
        ap = np.asarray(p) - a
        t = np.clip((ap * ab).sum(axis=1) / ab2, 0.0, 1.0)
        proj = a + ab * t[:, None]
        d = np.hypot(*(np.asarray(p) - proj).T).min()
        worst = max(worst, d)
    return worst


def test_kinematics_matches_fine_step_reference():
    v, steer, wheelbase, dt, horizon = 0.2, math.radians(20), 0.15, 0.01, 10.0
    cfg = ChassisConfig(wheelbase=wheelbase)
    drive = DriveState(v, steer)
    pose = Pose(0.0, 0.0, 0.0)
    coarse = [(0.0, 0.0)]
    for _ in range(round(horizon / dt)):
        pose = step_kinematics(pose, drive, cfg, dt)
        coarse.append((pose.x, pose.y))
    reference = _fine_reference(v, steer, wheelbase, 1e-5, horizon)[::100]
    deviation = _max_distance_to_polyline(coarse, reference)
    assert deviation < 1e-3, f"deviation {deviation:.2e}"
    print(f"{PASS} kinematics oracle (max deviation {deviation:.2e} m < 1e-3)")


# ----------------------------------------------------------------- protocol

def _random_message(rng: random.Random):
    kind = rng.randrange(7)
    if kind == 0:
        return CmdDrive(rng.randint(-100, 100), rng.randint(-30, 30))
    if kind == 1:
        return CmdCamera(rng.randint(-360, 360), rng.randint(-30, 30))
    if kind == 2:
        return CmdMode(rng.randint(0, 1))
    if kind == 3:
        return CmdRecord(rng.randint(0, 2))
    if kind == 4:
        f32 = lambda: float(np.float32(rng.uniform(-100, 100)))
        return Telemetry(
            rng.getrandbits(64), f32(), f32(), f32(), f32(),
            rng.randint(0, 0xFFFF), rng.randint(0, 0xFFFF),
            rng.randint(0, 1), rng.randint(0, 3), rng.randint(0, 359), rng.randint(-30, 30),
        )
    if kind == 5:
        w, h = rng.randint(1, 40), rng.randint(1, 30)
        return VideoFrame(rng.getrandbits(64), rng.randint(0, 359), w, h,
                          rng.randbytes(w * h))
    return Event(rng.getrandbits(64), rng.randint(0, 255), rng.randint(0, 255))


def test_protocol_round_trip_fuzz_and_goldens():
    golden = bytes.fromhex("c30101000232f6")
    assert encode(CmdDrive(50, -10)) == golden
    assert decode(golden) == (CmdDrive(50, -10), 7)

    rng = random.Random(2024)
    for _ in range(10_000):
        msg = _random_message(rng)
        data = encode(msg)
        decoded, consumed = decode(data)
        assert decoded == msg and consumed == len(data)

    fuzz = random.Random(4096)
    for _ in range(10_000):
        buf = fuzz.randbytes(fuzz.randint(0, 100))
        try:
            decode(buf)
        except DecodeError:
            pass
    print(f"{PASS} protocol (10k round trips, 10k fuzz buffers, goldens)")


# -------------------------------------------------------------- sensor math

def test_sensor_math():
    # HC-SR04 conversion: 5831 us -> 1.0000165 m -> 1.00 after quantization
    assert echo_to_distance(5831) == pytest.approx(1.00, abs=1e-12)

    # shading formula at the 4 m / 8 m midpoint rounds half-up to 128
    assert math.floor(255.0 * (1.0 - 4.0 / 8.0) + 0.5) == 128

    # uniform wall 4 m ahead: every column matches per-column trigonometry
    cam = CameraConfig()
    pose = Pose(10.0, 25.0, 0.0)
    world = _world((14, 0, 1, 50), bounds=(50, 50))
    frame = render_frame(world, pose, GimbalState(), 0, cam)
    fov = math.radians(cam.fov_deg)
    for c in range(cam.width):
        ang = fov * (c / (cam.width - 1) - 0.5)
        depth = min(4.0 / math.cos(ang), cam.max_range)
        assert frame.pixels[c] == math.floor(255.0 * (1.0 - depth / cam.max_range) + 0.5)
    assert frame.pixels[0] == frame.pixels[cam.width - 1] == 108

    # readings are exact multiples of the quantum
    ucfg = UltrasonicConfig()
    rng = random.Random(0)
    worlds = [_random_world(seed) for seed in range(3)]
    checked = 0
    for world in worlds:
        for k in range(200):
            pose = Pose(rng.uniform(1, 19), rng.uniform(1, 19), rng.uniform(0, 2 * math.pi))
            reading = read_ultrasonic(world, pose, ucfg, rng, nose_offset=0.12)
            if reading.range_m is not None:
                ratio = reading.range_m / ucfg.quantum
                assert abs(ratio - round(ratio)) < 1e-9
                checked += 1
    assert checked > 100
    print(f"{PASS} sensor math (echo 1.00 m, shade(4m)=128, {checked} quantized readings)")


# ------------------------------------------------------------ replay fidelity

def test_replay_fidelity_and_snapshots(tmp_path):
    script = parse_script(
        "\n".join(
            [
                "0 " + encode(CmdMode(1)).hex(),
                "100 " + encode(CmdRecord(2)).hex(),
            ]
        )
    )
    world = _world((14, 8, 1, 4))
    cfg = ServiceConfig(record_dir=str(tmp_path), seed=5)
    sim = Simulation(cfg, world)
    emitted = run_headless(sim, 300, script, collect=True)
    sim.close()

    replayed = list(read_session(tmp_path / "session_0.woslog"))
    assert replayed == emitted

    (snap,) = sorted(tmp_path.glob("snap_*.pgm"))
    data = snap.read_bytes()
    header = b"P5\n120 90\n255\n"
    assert data.startswith(header)
    assert len(data) == len(header) + 10800  # 10814: 14-byte header + pixels
    print(f"{PASS} replay fidelity ({len(replayed)} messages identical, PGM byte-exact)")


# ----------------------------------------------------------------- brownout

def test_brownout_kills_video_keeps_telemetry():
    cfg = ServiceConfig(mode=Mode.AUTO)
    cfg = replace(cfg, power=PowerConfig(capacity_ah=2.0, initial_ah=0.16, v_empty=6.0))
    sim = Simulation(cfg, _world())
    messages = run_headless(sim, 2000, collect=True)

    brownouts = [m for m in messages if isinstance(m, Event) and m.code == protocol.EV_BROWNOUT]
    assert len(brownouts) == 1
    cut = brownouts[0].tick

    assert [m for m in messages if isinstance(m, VideoFrame) and m.tick >= cut] == []
    assert [m for m in messages if isinstance(m, VideoFrame)], "no video before brownout"
    after = [m for m in messages if isinstance(m, Telemetry) and m.tick > cut]
    assert len(after) == 2000 - cut - 1
    print(f"{PASS} brownout (event at tick {cut}, video stops, telemetry continues)")
