"""Session logs: append-only files of encoded wire frames for later replay.

A log is the 8-byte header ``WOSLOG1\\n`` followed by encoded Telemetry,
VideoFrame, and Event frames in emission order. Because the wire format is
bit-exact, replaying a log reproduces the original stream byte for byte.
"""

from __future__ import annotations

from pathlib import Path
from typing import BinaryIO, Iterator

from .protocol import DecodeError, Message, decode

LOG_MAGIC = b"WOSLOG1\n"


class ReplayError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class SessionWriter:
    """Writes one session log; records must already be encoded frames."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._fh: BinaryIO = open(self.path, "wb")
        self._fh.write(LOG_MAGIC)

    def append(self, frame_bytes: bytes) -> None:
        self._fh.write(frame_bytes)

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self) -> "SessionWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_session(path: str | Path) -> Iterator[Message]:
    """Yield the messages of a session log in recorded order.

    Raises ReplayError naming the byte offset of the first malformed record
    (or offset 0 for a bad header).
    """
    data = Path(path).read_bytes()
    if not data.startswith(LOG_MAGIC):
        raise ReplayError("bad session log header", 0)
    offset = len(LOG_MAGIC)
    while offset < len(data):
        try:
            result = decode(data[offset:])
        except DecodeError as exc:
            raise ReplayError(f"corrupt record: {exc.reason}", offset) from exc
        if result is None:
            raise ReplayError("truncated record", offset)
        msg, consumed = result
        yield msg
        offset += consumed
