"""2D obstacle world, rover pose, bicycle kinematics, and ray queries.

The world is an axis-aligned rectangle (lower-left corner at the origin)
containing axis-aligned rectangular obstacles. The boundary itself acts as
a wall for ray queries and as a fence for collision checks.

All operations here are pure functions over immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


class WorldError(ValueError):
    """Base class for world-file problems."""


class WorldParseError(WorldError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class WorldValidationError(WorldError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, slots=True)
class Rect:
    """Axis-aligned rectangle: lower-left corner plus size, in meters."""

    x: float
    y: float
    w: float
    h: float

    @property
    def x1(self) -> float:
        return self.x + self.w

    @property
    def y1(self) -> float:
        return self.y + self.h


@dataclass(frozen=True)
class World:
    bounds: Rect
    obstacles: tuple[Rect, ...] = ()
    # cached (x0, y0, x1, y1) tuples for the ray/collision hot paths
    _aabbs: tuple[tuple[float, float, float, float], ...] = field(
        init=False, repr=False, compare=False, default=()
    )
    _aabb_array: np.ndarray | None = field(
        init=False, repr=False, compare=False, default=None
    )

    def __post_init__(self):
        aabbs = tuple((r.x, r.y, r.x1, r.y1) for r in self.obstacles)
        object.__setattr__(self, "_aabbs", aabbs)
        b = self.bounds
        arr = np.array(aabbs + ((b.x, b.y, b.x1, b.y1),), dtype=np.float64)
        object.__setattr__(self, "_aabb_array", arr)


@dataclass(frozen=True, slots=True)
class Pose:
    """Rover position and heading; heading is normalized to [0, 2*pi)."""

    x: float
    y: float
    heading: float


@dataclass(frozen=True, slots=True)
class ChassisConfig:
    """Kinematic and actuation limits of the simulated chassis.

    The slew limits bound how fast the drive train and steering servo can
    move between commanded setpoints.
    """

    wheelbase: float = 0.15
    max_speed: float = 0.5
    max_steer: float = math.radians(30.0)
    body_radius: float = 0.12
    accel_limit: float = 1.0
    steer_rate: float = math.radians(120.0)


DEFAULT_CHASSIS = ChassisConfig()


def normalize_heading(heading: float) -> float:
    """Wrap an angle into [0, 2*pi)."""
    h = math.fmod(heading, TWO_PI)
    if h < 0.0:
        h += TWO_PI
    if h >= TWO_PI:
        h = 0.0
    return h


def angle_diff(a: float, b: float) -> float:
    """Shortest signed angular distance a - b, in [-pi, pi)."""
    d = math.fmod(a - b + math.pi, TWO_PI)
    if d < 0.0:
        d += TWO_PI
    return d - math.pi


def load_world(text: str) -> World:
    """Parse a world file.

    Format: first significant line is ``bounds <w> <h>``; every following
    significant line is ``rect <x> <y> <w> <h>`` (lower-left corner plus
    size, meters). Blank lines and lines starting with ``#`` are skipped.
    """
    bounds: Rect | None = None
    obstacles: list[Rect] = []
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        keyword = parts[0]
        if bounds is None:
            if keyword != "bounds":
                raise WorldParseError(lineno, f"expected 'bounds <w> <h>', got {keyword!r}")
            if len(parts) != 3:
                raise WorldParseError(lineno, "bounds takes exactly 2 values")
            try:
                w, h = float(parts[1]), float(parts[2])
            except ValueError:
                raise WorldParseError(lineno, "bounds values must be numbers") from None
            if not (w > 0 and h > 0 and math.isfinite(w) and math.isfinite(h)):
                raise WorldParseError(lineno, "bounds width and height must be positive")
            bounds = Rect(0.0, 0.0, w, h)
        elif keyword == "rect":
            if len(parts) != 5:
                raise WorldParseError(lineno, "rect takes exactly 4 values")
            try:
                x, y, w, h = (float(p) for p in parts[1:])
            except ValueError:
                raise WorldParseError(lineno, "rect values must be numbers") from None
            if not all(map(math.isfinite, (x, y, w, h))) or w <= 0 or h <= 0:
                raise WorldParseError(lineno, "rect must have positive finite size")
            rect = Rect(x, y, w, h)
            if x < bounds.x or y < bounds.y or rect.x1 > bounds.x1 or rect.y1 > bounds.y1:
                raise WorldValidationError(lineno, f"obstacle {line!r} exceeds world bounds")
            obstacles.append(rect)
        elif keyword == "bounds":
            raise WorldParseError(lineno, "duplicate bounds declaration")
        else:
            raise WorldParseError(lineno, f"unknown keyword {keyword!r}")
    if bounds is None:
        raise WorldParseError(lineno, "missing bounds declaration")
    return World(bounds, tuple(obstacles))


def step_kinematics(pose: Pose, drive, cfg: ChassisConfig, dt: float) -> Pose:
    """Advance one forward-Euler step of the front-steer bicycle model.

    Position integrates along the pre-step heading; the heading then turns
    by v*tan(steer)/wheelbase * dt and wraps into [0, 2*pi).
    """
    v = drive.speed
    x = pose.x + v * math.cos(pose.heading) * dt
    y = pose.y + v * math.sin(pose.heading) * dt
    heading = normalize_heading(pose.heading + (v * math.tan(drive.steer) / cfg.wheelbase) * dt)
    return Pose(x, y, heading)


def _slab_hit(aabb, ox: float, oy: float, dx: float, dy: float) -> float | None:
    # Returns the nonnegative ray parameter of the nearest edge crossing,
    # or None. An origin inside the box hits its exit edge.
    x0, y0, x1, y1 = aabb
    if dx != 0.0:
        t1 = (x0 - ox) / dx
        t2 = (x1 - ox) / dx
        if t1 < t2:
            tnx, tfx = t1, t2
        else:
            tnx, tfx = t2, t1
    else:
        if not (x0 <= ox <= x1):
            return None
        tnx, tfx = -math.inf, math.inf
    if dy != 0.0:
        t1 = (y0 - oy) / dy
        t2 = (y1 - oy) / dy
        if t1 < t2:
            tny, tfy = t1, t2
        else:
            tny, tfy = t2, t1
    else:
        if not (y0 <= oy <= y1):
            return None
        tny, tfy = -math.inf, math.inf
    tmin = tnx if tnx > tny else tny
    tmax = tfx if tfx < tfy else tfy
    if tmax < tmin or tmax < 0.0:
        return None
    return tmin if tmin >= 0.0 else tmax


def raycast(
    world: World,
    origin: tuple[float, float],
    direction: tuple[float, float],
    max_range: float,
) -> float | None:
    """Distance to the nearest obstacle edge or world boundary along a ray.

    ``direction`` must be a unit vector. Returns None when nothing is hit
    within ``max_range``.
    """
    ox, oy = origin
    dx, dy = direction
    best = math.inf
    for aabb in world._aabbs:
        t = _slab_hit(aabb, ox, oy, dx, dy)
        if t is not None and t < best:
            best = t
    b = world.bounds
    t = _slab_hit((b.x, b.y, b.x1, b.y1), ox, oy, dx, dy)
    if t is not None and t < best:
        best = t
    if best <= max_range:
        return best
    return None


def raycast_fan(
    world: World,
    origin: tuple[float, float],
    dirs_x: np.ndarray,
    dirs_y: np.ndarray,
) -> np.ndarray:
    """Vectorized raycast for many unit directions from one origin.

    Semantics match :func:`raycast` exactly (same slab arithmetic); misses
    come back as +inf rather than None. Used by the frame renderer where a
    per-column Python loop would dominate the tick budget.
    """
    ox, oy = origin
    boxes = world._aabb_array  # (R, 4), world bounds included as last row
    x0 = boxes[:, 0]
    y0 = boxes[:, 1]
    x1 = boxes[:, 2]
    y1 = boxes[:, 3]

    dx = dirs_x[:, None]
    dy = dirs_y[:, None]
    nz_x = dx != 0.0
    nz_y = dy != 0.0
    safe_x = np.where(nz_x, dx, 1.0)
    safe_y = np.where(nz_y, dy, 1.0)
    in_x = (x0 <= ox) & (ox <= x1)
    in_y = (y0 <= oy) & (oy <= y1)

    with np.errstate(divide="ignore", over="ignore"):
        qx1 = (x0 - ox) / safe_x
        qx2 = (x1 - ox) / safe_x
        qy1 = (y0 - oy) / safe_y
        qy2 = (y1 - oy) / safe_y
    # a parallel ray outside a slab gets the empty interval (+inf, -inf)
    tnx = np.where(nz_x, np.minimum(qx1, qx2), np.where(in_x, -np.inf, np.inf))
    tfx = np.where(nz_x, np.maximum(qx1, qx2), np.where(in_x, np.inf, -np.inf))
    tny = np.where(nz_y, np.minimum(qy1, qy2), np.where(in_y, -np.inf, np.inf))
    tfy = np.where(nz_y, np.maximum(qy1, qy2), np.where(in_y, np.inf, -np.inf))

    tmin = np.maximum(tnx, tny)
    tmax = np.minimum(tfx, tfy)
    hit = (tmax >= tmin) & (tmax >= 0.0)
    t = np.where(tmin >= 0.0, tmin, tmax)
    t = np.where(hit, t, np.inf)
    return t.min(axis=1)


def collision_check(world: World, pose: Pose, body_radius: float) -> bool:
    """True iff the body disc strictly overlaps an obstacle or leaves bounds.

    Tangency (separation exactly equal to body_radius) does not count.
    """
    x, y = pose.x, pose.y
    b = world.bounds
    if x - body_radius < b.x or x + body_radius > b.x1:
        return True
    if y - body_radius < b.y or y + body_radius > b.y1:
        return True
    r2 = body_radius * body_radius
    for x0, y0, x1, y1 in world._aabbs:
        cx = x0 if x < x0 else (x1 if x > x1 else x)
        cy = y0 if y < y0 else (y1 if y > y1 else y)
        dx = x - cx
        dy = y - cy
        if dx * dx + dy * dy < r2:
            return True
    return False
