"""Service configuration: defaults plus a line-oriented ``key = value`` file.

Unknown keys are rejected so typos fail fast at startup instead of being
silently ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .autonomy import AutonomyParams, Mode
from .hardware import PowerConfig
from .sensing import CameraConfig, UltrasonicConfig
from .world import ChassisConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ServiceConfig:
    world_path: str | None = None
    tick_hz: int = 50
    frame_every: int = 5
    telemetry_every: int = 1
    listen_tcp: str = "127.0.0.1:7501"
    listen_ws: str = "127.0.0.1:7502"
    seed: int = 0
    record_dir: str | None = None
    static_dir: str | None = None
    mode: Mode = Mode.MANUAL
    start_x: float | None = None  # None centers the rover in the world
    start_y: float | None = None
    start_heading_deg: float = 0.0
    command_timeout: float = 0.5
    chassis: ChassisConfig = field(default_factory=ChassisConfig)
    ultrasonic: UltrasonicConfig = field(default_factory=UltrasonicConfig)
    camera: CameraConfig = field(default_factory=CameraConfig)
    autonomy: AutonomyParams = field(default_factory=AutonomyParams)
    power: PowerConfig = field(default_factory=PowerConfig)

    @property
    def dt(self) -> float:
        return 1.0 / self.tick_hz

    def validate(self) -> "ServiceConfig":
        if self.tick_hz <= 0:
            raise ConfigError("tick_hz must be positive")
        if self.frame_every < 1 or self.telemetry_every < 1:
            raise ConfigError("frame_every and telemetry_every must be >= 1")
        a = self.autonomy
        if not (0 < a.stop_distance < a.clear_distance <= self.ultrasonic.max_range):
            raise ConfigError("need 0 < stop_distance < clear_distance <= sensor max_range")
        if not (0 < a.turn_angle_deg <= 180):
            raise ConfigError("turn_angle_deg must be in (0, 180]")
        if not (0 < a.cruise_throttle <= 100):
            raise ConfigError("cruise_throttle must be in (0, 100]")
        return self


def _parse_mode(value: str) -> Mode:
    try:
        return Mode[value.strip().upper()]
    except KeyError:
        raise ConfigError(f"mode must be 'manual' or 'auto', got {value!r}") from None


# key -> (section, attribute, converter); section None targets ServiceConfig itself
_KEYS: dict[str, tuple[str | None, str, type | object]] = {
    "world": (None, "world_path", str),
    "tick_hz": (None, "tick_hz", int),
    "frame_every": (None, "frame_every", int),
    "telemetry_every": (None, "telemetry_every", int),
    "listen_tcp": (None, "listen_tcp", str),
    "listen_ws": (None, "listen_ws", str),
    "seed": (None, "seed", int),
    "record_dir": (None, "record_dir", str),
    "static_dir": (None, "static_dir", str),
    "mode": (None, "mode", _parse_mode),
    "start_x": (None, "start_x", float),
    "start_y": (None, "start_y", float),
    "start_heading_deg": (None, "start_heading_deg", float),
    "command_timeout": (None, "command_timeout", float),
    "wheelbase": ("chassis", "wheelbase", float),
    "max_speed": ("chassis", "max_speed", float),
    "max_steer_deg": ("chassis", "max_steer", lambda v: math.radians(float(v))),
    "body_radius": ("chassis", "body_radius", float),
    "accel_limit": ("chassis", "accel_limit", float),
    "steer_rate_deg": ("chassis", "steer_rate", lambda v: math.radians(float(v))),
    "ultra_max_range": ("ultrasonic", "max_range", float),
    "ultra_beam_halfwidth_deg": ("ultrasonic", "beam_halfwidth_deg", float),
    "ultra_quantum": ("ultrasonic", "quantum", float),
    "ultra_noise_sigma": ("ultrasonic", "noise_sigma", float),
    "cam_fov_deg": ("camera", "fov_deg", float),
    "cam_max_range": ("camera", "max_range", float),
    "cam_width": ("camera", "width", int),
    "cam_height": ("camera", "height", int),
    "stop_distance": ("autonomy", "stop_distance", float),
    "clear_distance": ("autonomy", "clear_distance", float),
    "turn_angle_deg": ("autonomy", "turn_angle_deg", float),
    "cruise_throttle": ("autonomy", "cruise_throttle", int),
    "max_turn_attempts": ("autonomy", "max_turn_attempts", int),
    "battery_capacity_ah": ("power", "capacity_ah", float),
    "battery_initial_ah": ("power", "initial_ah", float),
    "battery_v_full": ("power", "v_full", float),
    "battery_v_empty": ("power", "v_empty", float),
    "regulator_dropout_v": ("power", "dropout_v", float),
    "idle_current_a": ("power", "idle_current_a", float),
    "motor_current_a": ("power", "motor_current_a", float),
    "camera_current_a": ("power", "camera_current_a", float),
}


def parse_config(text: str, base: ServiceConfig | None = None) -> ServiceConfig:
    """Parse ``key = value`` lines into a ServiceConfig."""
    cfg = base if base is not None else ServiceConfig()
    sections: dict[str, dict] = {}
    top: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        spec = _KEYS.get(key)
        if spec is None:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        section, attr, conv = spec
        try:
            parsed = conv(value)
        except ConfigError:
            raise
        except (TypeError, ValueError):
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
        if section is None:
            top[attr] = parsed
        else:
            sections.setdefault(section, {})[attr] = parsed
    for section, values in sections.items():
        top[section] = replace(getattr(cfg, section), **values)
    return replace(cfg, **top).validate()


def load_config(path: str | Path, base: ServiceConfig | None = None) -> ServiceConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), base)
