"""The runnable rover: a fixed-tick simulation loop composing the world,
hardware, sensing, and autonomy modules, plus session recording.

All physics and logging run on simulated tick time; nothing in this module
reads a wall clock, so a given (seed, world, config, command script) always
produces byte-identical session logs. Wall-clock pacing happens only in the
network layer.

Tick order (fixed):
  1. drain operator messages (mode/camera/record apply now, last drive latches)
  2. read the ultrasonic ranger
  3. step autonomy (AUTO only)
  4. arbitrate operator vs autonomy command
  5. slew the drive state toward the command
  6. integrate kinematics
  7. collision check (collision zeroes speed, holds position, emits an event)
  8. battery discharge and rail regulation (brownout edge emits an event)
  9. telemetry every telemetry_every ticks
 10. render + emit a video frame every frame_every ticks, unless browned out
 11. append this tick's emissions to the session log when recording
"""

from __future__ import annotations

import math
import random
import struct
from pathlib import Path
from typing import Sequence

from . import protocol
from .autonomy import AutonomyState, Mode, Phase, arbitrate, step_autonomy
from .config import ServiceConfig
from .hardware import (
    AT_REST,
    Battery,
    DriveCommand,
    PowerRail,
    apply_drive_command,
    load_current,
    regulate,
    step_battery,
)
from .protocol import Event, Message, Telemetry, VideoFrame, decode, encode
from .sensing import (
    Frame,
    GimbalState,
    frame_to_pgm,
    pan_camera,
    read_ultrasonic,
    render_frame,
)
from .session import SessionWriter
from .world import Pose, World, collision_check, step_kinematics


class StartupError(RuntimeError):
    pass


def _half_up(value: float) -> int:
    return math.floor(value + 0.5)


def _f32(value: float) -> float:
    # telemetry floats travel as binary32; emit what the wire carries
    return struct.unpack(">f", struct.pack(">f", value))[0]


class Simulation:
    """Owns all mutable rover state and advances it one tick at a time.

    Single-threaded by design: the network layer feeds inbound messages in
    and broadcasts the returned emissions; headless runs call step() in a
    plain loop.
    """

    def __init__(self, config: ServiceConfig, world: World):
        self.config = config
        self.world = world
        self.tick_index = 0
        self.mode = config.mode
        self.rng = random.Random(config.seed)
        b = world.bounds
        start_x = config.start_x if config.start_x is not None else b.x + b.w / 2.0
        start_y = config.start_y if config.start_y is not None else b.y + b.h / 2.0
        self.pose = Pose(start_x, start_y, math.radians(config.start_heading_deg))
        if collision_check(world, self.pose, config.chassis.body_radius):
            raise StartupError(f"start pose ({start_x}, {start_y}) collides with the world")
        self.drive = AT_REST
        self.gimbal = GimbalState()
        self.autonomy_state = AutonomyState()
        self.battery = Battery.fresh(config.power)
        self.rail = PowerRail(5.0, False)
        self.last_frame: Frame | None = None
        self.last_reading = None
        self._latched_cmd: DriveCommand | None = None
        self._latched_tick = -1
        self._timeout_ticks = round(config.command_timeout * config.tick_hz)
        self._recorder: SessionWriter | None = None
        if config.record_dir is not None:
            self._start_recording()

    # ----- recording ---------------------------------------------------

    def _record_path(self) -> Path:
        return Path(self.config.record_dir) / f"session_{self.tick_index}.woslog"

    def _start_recording(self) -> bool:
        if self.config.record_dir is None:
            return False
        try:
            Path(self.config.record_dir).mkdir(parents=True, exist_ok=True)
            self._recorder = SessionWriter(self._record_path())
        except OSError:
            self._recorder = None
            return False
        return True

    def _stop_recording(self) -> None:
        if self._recorder is not None:
            self._recorder.close()
            self._recorder = None

    @property
    def recording(self) -> bool:
        return self._recorder is not None

    def _snapshot(self, emits: list[Message]) -> None:
        t = self.tick_index
        if self.last_frame is None or self.config.record_dir is None:
            emits.append(Event(t, protocol.EV_RECORD_ERROR, 0))
            return
        try:
            Path(self.config.record_dir).mkdir(parents=True, exist_ok=True)
            path = Path(self.config.record_dir) / f"snap_{self.last_frame.tick}.pgm"
            path.write_bytes(frame_to_pgm(self.last_frame))
        except OSError:
            emits.append(Event(t, protocol.EV_RECORD_ERROR, 0))
            return
        emits.append(Event(t, protocol.EV_SNAPSHOT, 0))

    # ----- command handling --------------------------------------------

    def _apply_message(self, msg: Message, emits: list[Message]) -> None:
        t = self.tick_index
        if isinstance(msg, protocol.CmdDrive):
            clamped = DriveCommand.clamped(msg.throttle, msg.steer)
            if clamped.throttle != msg.throttle or clamped.steer != msg.steer:
                emits.append(Event(t, protocol.EV_CMD_CLAMPED, 0))
            self._latched_cmd = clamped
            self._latched_tick = t
        elif isinstance(msg, protocol.CmdCamera):
            self.gimbal = pan_camera(self.gimbal, msg.delta_pan, msg.delta_tilt)
        elif isinstance(msg, protocol.CmdMode):
            new_mode = Mode.AUTO if msg.mode == Mode.AUTO else Mode.MANUAL
            if new_mode != self.mode:
                self.mode = new_mode
                if new_mode == Mode.AUTO:
                    self.autonomy_state = AutonomyState()
        elif isinstance(msg, protocol.CmdRecord):
            if msg.action == 1 and not self.recording:
                if self._start_recording():
                    emits.append(Event(t, protocol.EV_RECORDING, 1))
                else:
                    emits.append(Event(t, protocol.EV_RECORD_ERROR, 0))
            elif msg.action == 0 and self.recording:
                self._stop_recording()
                emits.append(Event(t, protocol.EV_RECORDING, 0))
            elif msg.action == 2:
                self._snapshot(emits)
        # anything else coming from a client is ignored

    def _operator_command(self) -> DriveCommand | None:
        if self._latched_cmd is None:
            return None
        if self.tick_index - self._latched_tick > self._timeout_ticks:
            return None  # deadman: the link went quiet
        return self._latched_cmd

    # ----- telemetry ----------------------------------------------------

    def _telemetry(self) -> Telemetry:
        reading = self.last_reading
        if reading is not None and reading.in_range:
            range_cm = _half_up(reading.range_m * 100.0)
        else:
            range_cm = protocol.RANGE_OUT_OF_RANGE
        return Telemetry(
            tick=self.tick_index,
            x=_f32(self.pose.x),
            y=_f32(self.pose.y),
            heading=_f32(self.pose.heading),
            speed=_f32(self.drive.speed),
            range_cm=range_cm,
            battery_mv=_half_up(self.battery.voltage * 1000.0),
            mode=int(self.mode),
            phase=int(self.autonomy_state.phase),
            pan=_half_up(self.gimbal.pan) % 360,
            tilt=_half_up(self.gimbal.tilt),
        )

    # ----- the tick ------------------------------------------------------

    def step(self, inbound: Sequence[Message] = ()) -> list[Message]:
        """Advance one tick; returns the messages to broadcast, in order."""
        cfg = self.config
        t = self.tick_index
        emits: list[Message] = []

        for msg in inbound:
            self._apply_message(msg, emits)

        reading = read_ultrasonic(
            self.world, self.pose, cfg.ultrasonic, self.rng,
            nose_offset=cfg.chassis.body_radius, tick=t,
        )
        self.last_reading = reading

        if self.mode == Mode.AUTO:
            prev = self.autonomy_state
            self.autonomy_state, auto_cmd = step_autonomy(
                prev, reading, self.pose, cfg.autonomy
            )
            if (
                prev.phase in (Phase.TURN_LEFT, Phase.TURN_RIGHT)
                and self.autonomy_state.phase == Phase.AVOID_STOP
            ):
                emits.append(Event(t, protocol.EV_BLOCKED, self.autonomy_state.attempts))
        else:
            auto_cmd = DriveCommand(0, 0)

        cmd = arbitrate(self.mode, self._operator_command(), auto_cmd)
        self.drive = apply_drive_command(cmd, self.drive, cfg.chassis, cfg.dt)

        candidate = step_kinematics(self.pose, self.drive, cfg.chassis, cfg.dt)
        if collision_check(self.world, candidate, cfg.chassis.body_radius):
            self.drive = type(self.drive)(0.0, self.drive.steer)
            emits.append(Event(t, protocol.EV_COLLISION, 0))
        else:
            self.pose = candidate

        amps = load_current(self.drive, cfg.chassis, not self.rail.brownout, cfg.power)
        self.battery = step_battery(self.battery, amps, cfg.dt, cfg.power)
        new_rail = regulate(self.battery.voltage, cfg.power)
        if new_rail.brownout and not self.rail.brownout:
            emits.append(Event(t, protocol.EV_BROWNOUT, 1))
        self.rail = new_rail

        if t % cfg.telemetry_every == 0:
            emits.append(self._telemetry())

        if t % cfg.frame_every == 0 and not self.rail.brownout:
            frame = render_frame(self.world, self.pose, self.gimbal, t, cfg.camera)
            self.last_frame = frame
            emits.append(
                VideoFrame(
                    t, _half_up(frame.pan) % 360, frame.width, frame.height, frame.pixels
                )
            )

        if self._recorder is not None:
            for msg in emits:
                self._recorder.append(encode(msg))

        self.tick_index += 1
        return emits

    def close(self) -> None:
        self._stop_recording()


def parse_script(text: str) -> dict[int, list[Message]]:
    """Parse a headless command script: lines of ``<tick> <frame-as-hex>``.

    The hex must be exactly one complete wire frame. Blank lines and ``#``
    comments are allowed.
    """
    script: dict[int, list[Message]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"script line {lineno}: expected '<tick> <hex>'")
        try:
            tick = int(parts[0])
            data = bytes.fromhex(parts[1])
        except ValueError:
            raise ValueError(f"script line {lineno}: bad tick or hex") from None
        try:
            result = decode(data)
        except protocol.DecodeError as exc:
            raise ValueError(f"script line {lineno}: bad frame ({exc.reason})") from None
        if result is None or result[1] != len(data):
            raise ValueError(f"script line {lineno}: hex is not exactly one frame")
        script.setdefault(tick, []).append(result[0])
    return script


def run_headless(
    sim: Simulation,
    ticks: int,
    script: dict[int, list[Message]] | None = None,
    collect: bool = False,
) -> list[Message]:
    """Run the loop flat out with scripted input; no network, no pacing."""
    script = script or {}
    collected: list[Message] = []
    for _ in range(ticks):
        emits = sim.step(script.get(sim.tick_index, ()))
        if collect:
            collected.extend(emits)
    return collected
