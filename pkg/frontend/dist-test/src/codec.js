/**
 * Wire codec for the rover link. Byte-for-byte the same layout the rover
 * speaks over TCP, WebSocket, and in session logs:
 *
 *   [magic 0xC3][version 0x01][type u8][length u16 BE][payload]
 *
 * One complete frame per binary WebSocket message.
 */
export const MAGIC = 0xc3;
export const VERSION = 0x01;
export const T_CMD_DRIVE = 0x01;
export const T_CMD_CAMERA = 0x02;
export const T_CMD_MODE = 0x03;
export const T_CMD_RECORD = 0x04;
export const T_TELEMETRY = 0x10;
export const T_VIDEO_FRAME = 0x11;
export const T_EVENT = 0x12;
export const RANGE_OUT_OF_RANGE = 0xffff;
export const EV_COLLISION = 1;
export const EV_BROWNOUT = 2;
export const EV_SNAPSHOT = 3;
export const EV_RECORD_ERROR = 4;
export const EV_CMD_REJECTED = 5;
export const EV_BLOCKED = 6;
export const EV_CMD_CLAMPED = 7;
export const EV_ROLE = 8;
export const EV_RECORDING = 9;
export class CodecError extends Error {
    constructor(reason) {
        super(reason);
        this.reason = reason;
    }
}
const HEADER_SIZE = 5;
const VIDEO_HEAD_SIZE = 14;
const FIXED_SIZES = {
    [T_CMD_DRIVE]: 2,
    [T_CMD_CAMERA]: 3,
    [T_CMD_MODE]: 1,
    [T_CMD_RECORD]: 1,
    [T_TELEMETRY]: 33,
    [T_EVENT]: 10,
};
function frame(type, payload) {
    const out = new Uint8Array(HEADER_SIZE + payload.length);
    const view = new DataView(out.buffer);
    view.setUint8(0, MAGIC);
    view.setUint8(1, VERSION);
    view.setUint8(2, type);
    view.setUint16(3, payload.length, false);
    out.set(payload, HEADER_SIZE);
    return out;
}
function checkRange(value, lo, hi, what) {
    if (!Number.isInteger(value) || value < lo || value > hi) {
        throw new CodecError(`${what} out of range: ${value}`);
    }
}
export function encodeDrive(throttle, steer) {
    checkRange(throttle, -100, 100, "throttle");
    checkRange(steer, -30, 30, "steer");
    const payload = new Uint8Array(2);
    const view = new DataView(payload.buffer);
    view.setInt8(0, throttle);
    view.setInt8(1, steer);
    return frame(T_CMD_DRIVE, payload);
}
export function encodeCamera(deltaPan, deltaTilt) {
    checkRange(deltaPan, -32768, 32767, "deltaPan");
    checkRange(deltaTilt, -128, 127, "deltaTilt");
    const payload = new Uint8Array(3);
    const view = new DataView(payload.buffer);
    view.setInt16(0, deltaPan, false);
    view.setInt8(2, deltaTilt);
    return frame(T_CMD_CAMERA, payload);
}
export function encodeMode(mode) {
    checkRange(mode, 0, 1, "mode");
    return frame(T_CMD_MODE, Uint8Array.of(mode));
}
export function encodeRecord(action) {
    checkRange(action, 0, 2, "record action");
    return frame(T_CMD_RECORD, Uint8Array.of(action));
}
export function encodeTelemetry(t) {
    const payload = new Uint8Array(33);
    const view = new DataView(payload.buffer);
    view.setBigUint64(0, t.tick, false);
    view.setFloat32(8, t.x, false);
    view.setFloat32(12, t.y, false);
    view.setFloat32(16, t.heading, false);
    view.setFloat32(20, t.speed, false);
    view.setUint16(24, t.rangeCm, false);
    view.setUint16(26, t.batteryMv, false);
    view.setUint8(28, t.mode);
    view.setUint8(29, t.phase);
    view.setUint16(30, t.pan, false);
    view.setInt8(32, t.tilt);
    return frame(T_TELEMETRY, payload);
}
export function encodeVideoFrame(v) {
    if (v.pixels.length !== v.width * v.height) {
        throw new CodecError("pixels do not match width*height");
    }
    if (v.pixels.length > 0xffff - VIDEO_HEAD_SIZE) {
        throw new CodecError("frame too large for u16 length");
    }
    const payload = new Uint8Array(VIDEO_HEAD_SIZE + v.pixels.length);
    const view = new DataView(payload.buffer);
    view.setBigUint64(0, v.tick, false);
    view.setUint16(8, v.pan, false);
    view.setUint16(10, v.width, false);
    view.setUint16(12, v.height, false);
    payload.set(v.pixels, VIDEO_HEAD_SIZE);
    return frame(T_VIDEO_FRAME, payload);
}
export function encodeEvent(tick, code, detail) {
    const payload = new Uint8Array(10);
    const view = new DataView(payload.buffer);
    view.setBigUint64(0, tick, false);
    view.setUint8(8, code);
    view.setUint8(9, detail);
    return frame(T_EVENT, payload);
}
/**
 * Decode exactly one complete frame. Returns null when the buffer is a
 * valid but incomplete prefix; throws CodecError on malformed bytes.
 */
export function decodeFrame(data) {
    if (data.length === 0)
        return null;
    if (data[0] !== MAGIC)
        throw new CodecError("BAD_MAGIC");
    if (data.length < 2)
        return null;
    if (data[1] !== VERSION)
        throw new CodecError("BAD_VERSION");
    if (data.length < 3)
        return null;
    const type = data[2];
    const fixed = FIXED_SIZES[type];
    if (fixed === undefined && type !== T_VIDEO_FRAME)
        throw new CodecError("BAD_TYPE");
    if (data.length < HEADER_SIZE)
        return null;
    const length = (data[3] << 8) | data[4];
    if (fixed !== undefined && length !== fixed)
        throw new CodecError("BAD_LENGTH");
    if (type === T_VIDEO_FRAME && length < VIDEO_HEAD_SIZE)
        throw new CodecError("BAD_LENGTH");
    const total = HEADER_SIZE + length;
    if (data.length < total)
        return null;
    const view = new DataView(data.buffer, data.byteOffset + HEADER_SIZE, length);
    let message;
    switch (type) {
        case T_CMD_DRIVE:
            message = { kind: "drive", throttle: view.getInt8(0), steer: view.getInt8(1) };
            break;
        case T_CMD_CAMERA:
            message = { kind: "camera", deltaPan: view.getInt16(0, false), deltaTilt: view.getInt8(2) };
            break;
        case T_CMD_MODE:
            message = { kind: "mode", mode: view.getUint8(0) };
            break;
        case T_CMD_RECORD:
            message = { kind: "record", action: view.getUint8(0) };
            break;
        case T_TELEMETRY:
            message = {
                kind: "telemetry",
                tick: view.getBigUint64(0, false),
                x: view.getFloat32(8, false),
                y: view.getFloat32(12, false),
                heading: view.getFloat32(16, false),
                speed: view.getFloat32(20, false),
                rangeCm: view.getUint16(24, false),
                batteryMv: view.getUint16(26, false),
                mode: view.getUint8(28),
                phase: view.getUint8(29),
                pan: view.getUint16(30, false),
                tilt: view.getInt8(32),
            };
            break;
        case T_VIDEO_FRAME: {
            const width = view.getUint16(10, false);
            const height = view.getUint16(12, false);
            if (length - VIDEO_HEAD_SIZE !== width * height)
                throw new CodecError("BAD_LENGTH");
            message = {
                kind: "video",
                tick: view.getBigUint64(0, false),
                pan: view.getUint16(8, false),
                width,
                height,
                pixels: data.slice(HEADER_SIZE + VIDEO_HEAD_SIZE, total),
            };
            break;
        }
        default:
            message = {
                kind: "event",
                tick: view.getBigUint64(0, false),
                code: view.getUint8(8),
                detail: view.getUint8(9),
            };
    }
    return { message, consumed: total };
}
export function toHex(data) {
    return Array.from(data, (b) => b.toString(16).padStart(2, "0")).join("");
}
export function fromHex(hex) {
    const clean = hex.replace(/\s+/g, "");
    const out = new Uint8Array(clean.length / 2);
    for (let i = 0; i < out.length; i++) {
        out[i] = parseInt(clean.slice(2 * i, 2 * i + 2), 16);
    }
    return out;
}
