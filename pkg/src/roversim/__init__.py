"""roversim: deterministic software twin of a teleoperated observation rover."""

from .autonomy import AutonomyParams, AutonomyState, Mode, Phase, arbitrate, step_autonomy
from .config import ConfigError, ServiceConfig, load_config, parse_config
from .hardware import (
    Battery,
    DriveCommand,
    DriveState,
    HBridgePins,
    PowerConfig,
    PowerRail,
    apply_drive_command,
    hbridge_pins,
    load_current,
    regulate,
    step_battery,
)
from .sensing import (
    CameraConfig,
    Frame,
    GimbalState,
    UltrasonicConfig,
    UltrasonicReading,
    echo_to_distance,
    frame_to_pgm,
    pan_camera,
    read_ultrasonic,
    render_frame,
)
from .service import Simulation, StartupError, parse_script, run_headless
from .session import LOG_MAGIC, ReplayError, SessionWriter, read_session
from .world import (
    ChassisConfig,
    Pose,
    Rect,
    World,
    WorldError,
    WorldParseError,
    WorldValidationError,
    collision_check,
    load_world,
    normalize_heading,
    raycast,
    step_kinematics,
)

__version__ = "0.1.0"
