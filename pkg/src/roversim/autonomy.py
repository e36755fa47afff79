"""Obstacle stop-and-turn autonomy.

Explicit finite state machine: cruise forward, stop when the ranger sees
something inside stop_distance, then attempt alternating left/right turns
(starting left) until the way ahead clears past clear_distance. Attempts
are bounded; an exhausted episode parks the rover until the operator takes
over.

The rover has no differential pivot, so a "turn" is an arc at half cruise
throttle with full steer; completion is heading-based with 3 degrees of
tolerance. Because every arc creeps forward, a turn attempt is abandoned
early (alternate or give up) the moment the ranger reads inside half the
stop distance; without that, alternating sweeps against a long wall walk
the rover into it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .hardware import STOP, DriveCommand
from .sensing import UltrasonicReading
from .world import Pose, angle_diff, normalize_heading

TURN_DONE_TOLERANCE = math.radians(3.0)
FULL_STEER_DEG = 30


class Mode(enum.IntEnum):
    MANUAL = 0
    AUTO = 1


class Phase(enum.IntEnum):
    FORWARD = 0
    AVOID_STOP = 1
    TURN_LEFT = 2
    TURN_RIGHT = 3


@dataclass(frozen=True, slots=True)
class AutonomyParams:
    stop_distance: float = 0.30
    clear_distance: float = 0.50
    turn_angle_deg: float = 45.0
    cruise_throttle: int = 60
    max_turn_attempts: int = 4


DEFAULT_AUTONOMY = AutonomyParams()


@dataclass(frozen=True, slots=True)
class AutonomyState:
    phase: Phase = Phase.FORWARD
    heading_target: float | None = None
    attempts: int = 0


def _turn_command(phase: Phase, params: AutonomyParams) -> DriveCommand:
    steer = FULL_STEER_DEG if phase == Phase.TURN_LEFT else -FULL_STEER_DEG
    return DriveCommand(round(params.cruise_throttle / 2), steer)


def step_autonomy(
    state: AutonomyState,
    reading: UltrasonicReading,
    pose: Pose,
    params: AutonomyParams,
) -> tuple[AutonomyState, DriveCommand]:
    """One FSM transition given the current tick's range measurement.

    Returns the next state and the drive command to hold for this tick.
    A TURN_* to AVOID_STOP transition means the attempt budget ran out
    (the service reports this as a BLOCKED event).
    """
    blocked_ahead = reading.in_range and reading.range_m < params.stop_distance
    turn = math.radians(params.turn_angle_deg)

    if state.phase == Phase.FORWARD:
        if blocked_ahead:
            return AutonomyState(Phase.AVOID_STOP, None, 0), STOP
        return AutonomyState(Phase.FORWARD, None, 0), DriveCommand(params.cruise_throttle, 0)

    if state.phase == Phase.AVOID_STOP:
        if state.attempts > 0:
            # exhausted episode: hold position until the operator intervenes
            return state, STOP
        target = normalize_heading(pose.heading + turn)
        return (
            AutonomyState(Phase.TURN_LEFT, target, 1),
            DriveCommand(0, FULL_STEER_DEG),
        )

    # TURN_LEFT / TURN_RIGHT
    assert state.heading_target is not None
    imminent = reading.in_range and reading.range_m < params.stop_distance / 2.0
    done = abs(angle_diff(pose.heading, state.heading_target)) <= TURN_DONE_TOLERANCE
    if not done and not imminent:
        return state, _turn_command(state.phase, params)
    if done and not imminent:
        clear = (not reading.in_range) or reading.range_m >= params.clear_distance
        if clear:
            return AutonomyState(Phase.FORWARD, None, 0), DriveCommand(params.cruise_throttle, 0)
    # attempt failed (still blocked, or contact imminent): alternate or give up
    if state.attempts + 1 > params.max_turn_attempts:
        return AutonomyState(Phase.AVOID_STOP, None, state.attempts), STOP
    next_phase = Phase.TURN_RIGHT if state.phase == Phase.TURN_LEFT else Phase.TURN_LEFT
    delta = -turn if next_phase == Phase.TURN_RIGHT else turn
    next_state = AutonomyState(
        next_phase, normalize_heading(pose.heading + delta), state.attempts + 1
    )
    return next_state, _turn_command(next_phase, params)


def arbitrate(
    mode: Mode,
    operator_cmd: DriveCommand | None,
    autonomy_cmd: DriveCommand,
) -> DriveCommand:
    """Pick the drive command for this tick.

    MANUAL follows the operator, falling back to a deadman stop when no
    fresh command exists; AUTO follows the state machine unconditionally.
    """
    if mode == Mode.AUTO:
        return autonomy_cmd
    return operator_cmd if operator_cmd is not None else STOP
