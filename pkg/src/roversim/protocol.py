"""Binary wire protocol shared by the service, session logs, and consoles.

Frame layout (all integers big-endian, floats IEEE-754 binary32):

    [magic 0xC3][version 0x01][type u8][length u16][payload ...]

Payloads:

    0x01 CmdDrive    throttle i8, steer i8
    0x02 CmdCamera   delta_pan i16, delta_tilt i8
    0x03 CmdMode     mode u8 (0 manual, 1 auto)
    0x04 CmdRecord   action u8 (0 stop, 1 start, 2 snapshot)
    0x10 Telemetry   tick u64, x f32, y f32, heading f32, speed f32,
                     range_cm u16 (0xFFFF = out of range), battery_mv u16,
                     mode u8, phase u8, pan u16, tilt i8
    0x11 VideoFrame  tick u64, pan u16, width u16, height u16, pixels
    0x12 Event       tick u64, code u8, detail u8

The same bytes travel over raw TCP (frames back to back) and WebSocket
(one frame per binary message), and make up session log records.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

MAGIC = 0xC3
VERSION = 0x01

T_CMD_DRIVE = 0x01
T_CMD_CAMERA = 0x02
T_CMD_MODE = 0x03
T_CMD_RECORD = 0x04
T_TELEMETRY = 0x10
T_VIDEO_FRAME = 0x11
T_EVENT = 0x12

RANGE_OUT_OF_RANGE = 0xFFFF

# Event codes (Event.code); detail is code-specific.
EV_COLLISION = 1
EV_BROWNOUT = 2
EV_SNAPSHOT = 3
EV_RECORD_ERROR = 4
EV_CMD_REJECTED = 5   # detail = wire type of the rejected command
EV_BLOCKED = 6        # detail = turn attempts consumed
EV_CMD_CLAMPED = 7
EV_ROLE = 8           # detail: 0 driver, 1 observer
EV_RECORDING = 9      # detail: 1 started, 0 stopped

BAD_MAGIC = "BAD_MAGIC"
BAD_VERSION = "BAD_VERSION"
BAD_TYPE = "BAD_TYPE"
BAD_LENGTH = "BAD_LENGTH"

_HEADER = struct.Struct(">BBBH")
_CMD_DRIVE = struct.Struct(">bb")
_CMD_CAMERA = struct.Struct(">hb")
_U8 = struct.Struct(">B")
_TELEMETRY = struct.Struct(">QffffHHBBHb")
_VIDEO_HEAD = struct.Struct(">QHHH")
_EVENT = struct.Struct(">QBB")

MAX_PIXELS = 0xFFFF - _VIDEO_HEAD.size


class DecodeError(Exception):
    """Malformed wire data; connection handlers drop the link on this."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True, slots=True)
class CmdDrive:
    throttle: int
    steer: int


@dataclass(frozen=True, slots=True)
class CmdCamera:
    delta_pan: int
    delta_tilt: int


@dataclass(frozen=True, slots=True)
class CmdMode:
    mode: int


@dataclass(frozen=True, slots=True)
class CmdRecord:
    action: int


@dataclass(frozen=True, slots=True)
class Telemetry:
    tick: int
    x: float
    y: float
    heading: float
    speed: float
    range_cm: int
    battery_mv: int
    mode: int
    phase: int
    pan: int
    tilt: int


@dataclass(frozen=True, slots=True)
class VideoFrame:
    tick: int
    pan: int
    width: int
    height: int
    pixels: bytes


@dataclass(frozen=True, slots=True)
class Event:
    tick: int
    code: int
    detail: int


Message = CmdDrive | CmdCamera | CmdMode | CmdRecord | Telemetry | VideoFrame | Event

_FIXED_SIZES = {
    T_CMD_DRIVE: _CMD_DRIVE.size,
    T_CMD_CAMERA: _CMD_CAMERA.size,
    T_CMD_MODE: _U8.size,
    T_CMD_RECORD: _U8.size,
    T_TELEMETRY: _TELEMETRY.size,
    T_EVENT: _EVENT.size,
}
_KNOWN_TYPES = frozenset(_FIXED_SIZES) | {T_VIDEO_FRAME}


def _payload(msg: Message) -> tuple[int, bytes]:
    if isinstance(msg, CmdDrive):
        return T_CMD_DRIVE, _CMD_DRIVE.pack(msg.throttle, msg.steer)
    if isinstance(msg, CmdCamera):
        return T_CMD_CAMERA, _CMD_CAMERA.pack(msg.delta_pan, msg.delta_tilt)
    if isinstance(msg, CmdMode):
        return T_CMD_MODE, _U8.pack(msg.mode)
    if isinstance(msg, CmdRecord):
        return T_CMD_RECORD, _U8.pack(msg.action)
    if isinstance(msg, Telemetry):
        return T_TELEMETRY, _TELEMETRY.pack(
            msg.tick, msg.x, msg.y, msg.heading, msg.speed,
            msg.range_cm, msg.battery_mv, msg.mode, msg.phase, msg.pan, msg.tilt,
        )
    if isinstance(msg, VideoFrame):
        if len(msg.pixels) != msg.width * msg.height:
            raise ValueError("pixel buffer does not match width*height")
        if len(msg.pixels) > MAX_PIXELS:
            raise ValueError(f"frame too large for u16 length ({len(msg.pixels)} pixels)")
        return T_VIDEO_FRAME, _VIDEO_HEAD.pack(msg.tick, msg.pan, msg.width, msg.height) + msg.pixels
    if isinstance(msg, Event):
        return T_EVENT, _EVENT.pack(msg.tick, msg.code, msg.detail)
    raise TypeError(f"not a wire message: {type(msg).__name__}")


def encode(msg: Message) -> bytes:
    """Serialize a message into one complete wire frame."""
    mtype, payload = _payload(msg)
    return _HEADER.pack(MAGIC, VERSION, mtype, len(payload)) + payload


def decode(buffer: bytes | bytearray | memoryview) -> tuple[Message, int] | None:
    """Parse one wire frame from the head of ``buffer``.

    Returns (message, bytes_consumed); None means the buffer holds a valid
    but incomplete prefix. Raises DecodeError (BAD_MAGIC / BAD_VERSION /
    BAD_TYPE / BAD_LENGTH) on malformed data, never anything else.
    """
    buf = bytes(buffer) if not isinstance(buffer, bytes) else buffer
    n = len(buf)
    if n == 0:
        return None
    if buf[0] != MAGIC:
        raise DecodeError(BAD_MAGIC)
    if n < 2:
        return None
    if buf[1] != VERSION:
        raise DecodeError(BAD_VERSION)
    if n < 3:
        return None
    mtype = buf[2]
    if mtype not in _KNOWN_TYPES:
        raise DecodeError(BAD_TYPE)
    if n < _HEADER.size:
        return None
    length = (buf[3] << 8) | buf[4]
    expected = _FIXED_SIZES.get(mtype)
    if expected is not None and length != expected:
        raise DecodeError(BAD_LENGTH)
    if mtype == T_VIDEO_FRAME and length < _VIDEO_HEAD.size:
        raise DecodeError(BAD_LENGTH)
    total = _HEADER.size + length
    if n < total:
        return None
    payload = buf[_HEADER.size:total]

    if mtype == T_CMD_DRIVE:
        msg: Message = CmdDrive(*_CMD_DRIVE.unpack(payload))
    elif mtype == T_CMD_CAMERA:
        msg = CmdCamera(*_CMD_CAMERA.unpack(payload))
    elif mtype == T_CMD_MODE:
        msg = CmdMode(payload[0])
    elif mtype == T_CMD_RECORD:
        msg = CmdRecord(payload[0])
    elif mtype == T_TELEMETRY:
        msg = Telemetry(*_TELEMETRY.unpack(payload))
    elif mtype == T_VIDEO_FRAME:
        tick, pan, width, height = _VIDEO_HEAD.unpack(payload[:_VIDEO_HEAD.size])
        pixels = payload[_VIDEO_HEAD.size:]
        if len(pixels) != width * height:
            raise DecodeError(BAD_LENGTH)
        msg = VideoFrame(tick, pan, width, height, pixels)
    else:
        msg = Event(*_EVENT.unpack(payload))
    return msg, total


class StreamDecoder:
    """Incremental decoder for a byte stream of back-to-back wire frames."""

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data: bytes) -> list[Message]:
        """Absorb bytes and return every now-complete message, in order."""
        self._buf.extend(data)
        out: list[Message] = []
        while True:
            result = decode(self._buf)
            if result is None:
                return out
            msg, consumed = result
            del self._buf[:consumed]
            out.append(msg)

    @property
    def pending_bytes(self) -> int:
        return len(self._buf)
