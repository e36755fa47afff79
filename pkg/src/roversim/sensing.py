"""Forward ultrasonic ranger and the panning night-vision camera.

The ranger fans 5 rays across the beam cone and reports the quantized
minimum. The camera renders one raycast per image column as a shaded
vertical stripe (inverse-depth grayscale), which keeps frames byte-exact
and cheap to stream.

Rounding is half-up everywhere so documented example values are exact.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .world import Pose, World, raycast, raycast_fan

SPEED_OF_SOUND = 343.0  # m/s


@dataclass(frozen=True, slots=True)
class UltrasonicConfig:
    max_range: float = 4.0
    beam_halfwidth_deg: float = 7.5
    quantum: float = 0.01
    noise_sigma: float = 0.0


DEFAULT_ULTRASONIC = UltrasonicConfig()


@dataclass(frozen=True, slots=True)
class UltrasonicReading:
    """One range measurement; range_m is None when out of range."""

    range_m: float | None
    tick: int

    @property
    def in_range(self) -> bool:
        return self.range_m is not None


@dataclass(frozen=True, slots=True)
class GimbalState:
    pan: float = 0.0   # degrees, wraps modulo 360
    tilt: float = 0.0  # degrees, clamped to [-30, 30]


@dataclass(frozen=True, slots=True)
class CameraConfig:
    fov_deg: float = 60.0
    max_range: float = 8.0
    width: int = 120
    height: int = 90


DEFAULT_CAMERA = CameraConfig()


@dataclass(frozen=True, slots=True)
class Frame:
    tick: int
    pan: float
    width: int
    height: int
    pixels: bytes


def round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


def quantize(distance: float, quantum: float) -> float:
    return round_half_up(distance / quantum) * quantum


def read_ultrasonic(
    world: World,
    pose: Pose,
    cfg: UltrasonicConfig,
    rng: random.Random,
    nose_offset: float = 0.0,
    tick: int = 0,
) -> UltrasonicReading:
    """Measure the forward distance from the rover nose.

    Five rays fan uniformly across [-beam_halfwidth, +beam_halfwidth]
    around the heading; the minimum hit gets Gaussian noise (when enabled),
    is clamped at zero, and is rounded half-up to the quantum. All-miss or
    a quantized value beyond max_range reads out of range.
    """
    origin = (
        pose.x + nose_offset * math.cos(pose.heading),
        pose.y + nose_offset * math.sin(pose.heading),
    )
    half = math.radians(cfg.beam_halfwidth_deg)
    best = None
    for k in range(5):
        ang = pose.heading - half + k * (half / 2.0)
        d = raycast(world, origin, (math.cos(ang), math.sin(ang)), cfg.max_range)
        if d is not None and (best is None or d < best):
            best = d
    if best is None:
        return UltrasonicReading(None, tick)
    if cfg.noise_sigma > 0.0:
        best += rng.gauss(0.0, cfg.noise_sigma)
        if best < 0.0:
            best = 0.0
    value = quantize(best, cfg.quantum)
    if value > cfg.max_range:
        return UltrasonicReading(None, tick)
    return UltrasonicReading(value, tick)


def echo_to_distance(
    echo_duration_us: float, cfg: UltrasonicConfig = DEFAULT_ULTRASONIC
) -> float | None:
    """HC-SR04 timing: distance = speed_of_sound * echo / 2.

    Durations beyond the max_range timeout equivalent read out of range;
    in-range results are quantized like live readings.
    """
    distance = SPEED_OF_SOUND * (echo_duration_us * 1e-6) / 2.0
    if distance > cfg.max_range:
        return None
    return quantize(distance, cfg.quantum)


def pan_camera(gimbal: GimbalState, delta_pan: float, delta_tilt: float) -> GimbalState:
    pan = math.fmod(gimbal.pan + delta_pan, 360.0)
    if pan < 0.0:
        pan += 360.0
    if pan >= 360.0:
        pan = 0.0
    tilt = gimbal.tilt + delta_tilt
    tilt = -30.0 if tilt < -30.0 else (30.0 if tilt > 30.0 else tilt)
    return GimbalState(pan, tilt)


def render_frame(
    world: World,
    pose: Pose,
    gimbal: GimbalState,
    tick: int,
    cfg: CameraConfig = DEFAULT_CAMERA,
) -> Frame:
    """Depth-strip render: column c looks along
    heading + pan + fov*(c/(width-1) - 0.5); its shade is
    round_half_up(255 * (1 - min(depth, R)/R)) for the whole column.

    Tilt has no pixel effect in a 2D world; it rides along in gimbal state.
    """
    base = pose.heading + math.radians(gimbal.pan)
    fov = math.radians(cfg.fov_deg)
    w = cfg.width
    angles = [base + fov * (c / (w - 1) - 0.5) for c in range(w)]
    dirs_x = np.array([math.cos(a) for a in angles])
    dirs_y = np.array([math.sin(a) for a in angles])
    depths = raycast_fan(world, (pose.x, pose.y), dirs_x, dirs_y)
    depths = np.minimum(depths, cfg.max_range)
    shades = np.floor(255.0 * (1.0 - depths / cfg.max_range) + 0.5).astype(np.uint8)
    row = shades.tobytes()
    return Frame(tick, gimbal.pan, w, cfg.height, row * cfg.height)


def frame_to_pgm(frame: Frame) -> bytes:
    """Binary PGM (P5, maxval 255) encoding of a frame."""
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + frame.pixels
