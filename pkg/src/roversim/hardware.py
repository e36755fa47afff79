"""Actuation and power chain: H-bridge mapping, drive slew dynamics,
battery discharge, and the 5 V buck rail feeding the camera.

The drive train never teleports between setpoints: speed and steering move
toward their targets limited by accel_limit (m/s^2) and steer_rate (rad/s),
snapping exactly onto the target once within one slew step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .world import ChassisConfig


def _clamp(v, lo, hi):
    return lo if v < lo else (hi if v > hi else v)


@dataclass(frozen=True, slots=True)
class DriveCommand:
    """Operator/autonomy intent: throttle percent and steer degrees."""

    throttle: int  # [-100, 100]
    steer: int     # [-30, 30], positive steers left (counterclockwise)

    @classmethod
    def clamped(cls, throttle: int, steer: int) -> "DriveCommand":
        return cls(int(_clamp(throttle, -100, 100)), int(_clamp(steer, -30, 30)))


STOP = DriveCommand(0, 0)


@dataclass(frozen=True, slots=True)
class DriveState:
    """Actual actuator state after slew dynamics: m/s and radians."""

    speed: float
    steer: float


AT_REST = DriveState(0.0, 0.0)


@dataclass(frozen=True, slots=True)
class HBridgePins:
    in1: int
    in2: int
    enable_duty: float


@dataclass(frozen=True, slots=True)
class PowerConfig:
    """Battery pack, regulator, and load-model constants.

    The default pack (12.6 V full, 9.0 V empty) never sags below the 6.5 V
    regulator dropout, so brownout only occurs with a weaker configured pack.
    """

    capacity_ah: float = 2.0
    initial_ah: float | None = None  # None means start full
    v_full: float = 12.6
    v_empty: float = 9.0
    dropout_v: float = 6.5
    idle_current_a: float = 0.2
    motor_current_a: float = 1.5
    camera_current_a: float = 0.3


DEFAULT_POWER = PowerConfig()


@dataclass(frozen=True, slots=True)
class Battery:
    voltage: float
    capacity_remaining: float
    nominal_capacity: float

    @classmethod
    def fresh(cls, power: PowerConfig = DEFAULT_POWER) -> "Battery":
        cap = power.capacity_ah if power.initial_ah is None else power.initial_ah
        cap = _clamp(cap, 0.0, power.capacity_ah)
        return cls(_pack_voltage(cap, power.capacity_ah, power), cap, power.capacity_ah)


@dataclass(frozen=True, slots=True)
class PowerRail:
    rail_voltage: float
    brownout: bool


def _pack_voltage(capacity: float, nominal: float, power: PowerConfig) -> float:
    return power.v_empty + (power.v_full - power.v_empty) * (capacity / nominal)


def _slew(current: float, target: float, rate: float, dt: float) -> float:
    step = rate * dt
    delta = target - current
    if abs(delta) <= step:
        return target
    return current + math.copysign(step, delta)


def apply_drive_command(
    cmd: DriveCommand, prev: DriveState, cfg: ChassisConfig, dt: float
) -> DriveState:
    """Move the drive state one slew step toward the commanded setpoints."""
    target_speed = cmd.throttle / 100.0 * cfg.max_speed
    target_steer = _clamp(math.radians(cmd.steer), -cfg.max_steer, cfg.max_steer)
    return DriveState(
        _slew(prev.speed, target_speed, cfg.accel_limit, dt),
        _slew(prev.steer, target_steer, cfg.steer_rate, dt),
    )


def hbridge_pins(throttle: int) -> HBridgePins:
    """Map signed throttle percent onto L293D direction pins and duty."""
    if throttle > 0:
        return HBridgePins(1, 0, throttle / 100.0)
    if throttle < 0:
        return HBridgePins(0, 1, -throttle / 100.0)
    return HBridgePins(0, 0, 0.0)


def step_battery(
    batt: Battery, load_current: float, dt: float, power: PowerConfig = DEFAULT_POWER
) -> Battery:
    """Discharge by load_current amperes over dt seconds (linear pack model)."""
    cap = batt.capacity_remaining - load_current * dt / 3600.0
    if cap < 0.0:
        cap = 0.0
    return Battery(_pack_voltage(cap, batt.nominal_capacity, power), cap, batt.nominal_capacity)


def regulate(battery_voltage: float, power: PowerConfig = DEFAULT_POWER) -> PowerRail:
    """Ideal buck rail: exactly 5 V above dropout, dead below it."""
    if battery_voltage >= power.dropout_v:
        return PowerRail(5.0, False)
    return PowerRail(0.0, True)


def load_current(
    drive: DriveState, cfg: ChassisConfig, camera_on: bool, power: PowerConfig = DEFAULT_POWER
) -> float:
    """Total pack draw: idle + speed-proportional motor draw + camera."""
    amps = power.idle_current_a + power.motor_current_a * abs(drive.speed) / cfg.max_speed
    if camera_on:
        amps += power.camera_current_a
    return amps
