import random
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roversim.protocol import (
    BAD_LENGTH,
    BAD_MAGIC,
    BAD_TYPE,
    BAD_VERSION,
    CmdCamera,
    CmdDrive,
    CmdMode,
    CmdRecord,
    DecodeError,
    Event,
    StreamDecoder,
    Telemetry,
    VideoFrame,
    decode,
    encode,
)

GOLDEN_DRIVE = bytes.fromhex("c3010100" + "02" + "32f6")


# ---------------------------------------------------------------- goldens

def test_golden_cmd_drive():
    assert encode(CmdDrive(50, -10)) == bytes.fromhex("c30101000232f6")


def test_golden_cmd_mode():
    assert encode(CmdMode(1)) == bytes.fromhex("c3010300" + "0101")


def test_golden_cmd_drive_decodes():
    msg, consumed = decode(bytes.fromhex("c30101000232f6"))
    assert msg == CmdDrive(50, -10)
    assert consumed == 7


# ------------------------------------------------------------ fixed sizes

@pytest.mark.parametrize(
    "msg,payload_len",
    [
        (CmdDrive(0, 0), 2),
        (CmdCamera(0, 0), 3),
        (CmdMode(0), 1),
        (CmdRecord(0), 1),
        (Telemetry(0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0), 33),
        (Event(0, 0, 0), 10),
    ],
)
def test_payload_lengths(msg, payload_len):
    assert len(encode(msg)) == 5 + payload_len


def test_video_frame_length():
    pixels = bytes(6)
    assert len(encode(VideoFrame(1, 0, 3, 2, pixels))) == 5 + 14 + 6


def test_video_frame_pixel_budget():
    too_many = bytes(0xFFFF - 14 + 1)
    with pytest.raises(ValueError):
        encode(VideoFrame(0, 0, 1, len(too_many), too_many))
    largest = bytes(0xFFFF - 14)
    assert len(encode(VideoFrame(0, 0, 1, len(largest), largest))) == 5 + 0xFFFF


def test_video_frame_pixels_must_match_dimensions():
    with pytest.raises(ValueError):
        encode(VideoFrame(0, 0, 4, 4, bytes(15)))


# --------------------------------------------------------------- errors

def test_bad_magic():
    with pytest.raises(DecodeError) as exc:
        decode(bytes.fromhex("ff0101000232f6"))
    assert exc.value.reason == BAD_MAGIC


def test_bad_version():
    with pytest.raises(DecodeError) as exc:
        decode(bytes.fromhex("c30201000232f6"))
    assert exc.value.reason == BAD_VERSION


def test_bad_type():
    with pytest.raises(DecodeError) as exc:
        decode(bytes.fromhex("c3017f000232f6"))
    assert exc.value.reason == BAD_TYPE


def test_bad_length_for_fixed_type():
    with pytest.raises(DecodeError) as exc:
        decode(bytes.fromhex("c3010100" + "03" + "32f600"))
    assert exc.value.reason == BAD_LENGTH


def test_video_dimension_mismatch_is_bad_length():
    head = struct.pack(">BBBH", 0xC3, 1, 0x11, 14 + 5) + struct.pack(">QHHH", 0, 0, 2, 2)
    with pytest.raises(DecodeError) as exc:
        decode(head + bytes(5))
    assert exc.value.reason == BAD_LENGTH


def test_truncated_frame_needs_more():
    frame = encode(CmdDrive(50, -10))
    for i in range(len(frame)):
        assert decode(frame[:i]) is None


# ------------------------------------------------------------ round trips

def _messages():
    f32 = st.floats(width=32, allow_nan=False, allow_infinity=False)
    video = st.tuples(
        st.integers(0, 2**64 - 1), st.integers(0, 359), st.integers(1, 64), st.integers(1, 48)
    ).flatmap(
        lambda t: st.binary(min_size=t[2] * t[3], max_size=t[2] * t[3]).map(
            lambda px: VideoFrame(t[0], t[1], t[2], t[3], px)
        )
    )
    return st.one_of(
        st.builds(CmdDrive, st.integers(-100, 100), st.integers(-30, 30)),
        st.builds(CmdCamera, st.integers(-360, 360), st.integers(-30, 30)),
        st.builds(CmdMode, st.integers(0, 1)),
        st.builds(CmdRecord, st.integers(0, 2)),
        st.builds(
            Telemetry,
            st.integers(0, 2**64 - 1), f32, f32, f32, f32,
            st.integers(0, 0xFFFF), st.integers(0, 0xFFFF),
            st.integers(0, 1), st.integers(0, 3),
            st.integers(0, 359), st.integers(-30, 30),
        ),
        video,
        st.builds(Event, st.integers(0, 2**64 - 1), st.integers(0, 255), st.integers(0, 255)),
    )


@given(_messages())
@settings(max_examples=300, deadline=None)
def test_round_trip_identity(msg):
    data = encode(msg)
    decoded, consumed = decode(data)
    assert decoded == msg
    assert consumed == len(data)
    # trailing garbage is untouched
    decoded2, consumed2 = decode(data + b"\xaa\xbb")
    assert decoded2 == msg and consumed2 == len(data)


@given(st.lists(_messages(), min_size=1, max_size=20))
@settings(max_examples=60, deadline=None)
def test_stream_decoding_preserves_order(messages):
    blob = b"".join(encode(m) for m in messages)
    dec = StreamDecoder()
    out = []
    # feed in awkward chunk sizes
    for i in range(0, len(blob), 7):
        out.extend(dec.feed(blob[i : i + 7]))
    assert out == messages
    assert dec.pending_bytes == 0


def test_injectivity_over_random_corpus():
    rng = random.Random(42)
    seen = {}
    for _ in range(4000):
        msg = CmdDrive(rng.randint(-100, 100), rng.randint(-30, 30))
        data = encode(msg)
        if data in seen:
            assert seen[data] == msg
        seen[data] = msg
    distinct = {(m.throttle, m.steer) for m in seen.values()}
    assert len(seen) == len(distinct)


# ------------------------------------------------------------------ fuzz

def test_fuzz_random_buffers_never_crash():
    rng = random.Random(0)
    outcomes = {"ok": 0, "need_more": 0, "error": 0}
    for _ in range(10_000):
        n = rng.randint(0, 80)
        buf = bytes(rng.getrandbits(8) for _ in range(n))
        try:
            result = decode(buf)
        except DecodeError:
            outcomes["error"] += 1
        else:
            outcomes["need_more" if result is None else "ok"] += 1
    assert sum(outcomes.values()) == 10_000


def test_fuzz_mutated_valid_frames():
    rng = random.Random(1)
    base = encode(Telemetry(9, 1.0, 2.0, 3.0, 0.25, 123, 11100, 1, 2, 270, -5))
    for _ in range(2_000):
        buf = bytearray(base)
        for _ in range(rng.randint(1, 4)):
            buf[rng.randrange(len(buf))] = rng.getrandbits(8)
        try:
            decode(bytes(buf))
        except DecodeError:
            pass
