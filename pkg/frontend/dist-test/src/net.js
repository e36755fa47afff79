/** WebSocket link to the rover with automatic reconnect. */
import { CodecError, decodeFrame } from "./codec.js";
const BACKOFF_START_MS = 500;
const BACKOFF_MAX_MS = 8000;
export class RoverLink {
    constructor(url, callbacks) {
        this.url = url;
        this.callbacks = callbacks;
        this.socket = null;
        this.backoff = BACKOFF_START_MS;
        this.timer = null;
        this.stopped = false;
    }
    start() {
        this.stopped = false;
        this.open();
    }
    stop() {
        this.stopped = true;
        if (this.timer)
            clearTimeout(this.timer);
        this.socket?.close();
        this.socket = null;
    }
    get connected() {
        return this.socket !== null && this.socket.readyState === WebSocket.OPEN;
    }
    send(frame) {
        if (this.connected)
            this.socket.send(frame);
    }
    open() {
        this.callbacks.onStatus("CONNECTING");
        const socket = new WebSocket(this.url);
        socket.binaryType = "arraybuffer";
        this.socket = socket;
        socket.onopen = () => {
            this.backoff = BACKOFF_START_MS;
            this.callbacks.onStatus("OPEN");
        };
        socket.onmessage = (event) => {
            if (!(event.data instanceof ArrayBuffer))
                return;
            try {
                const result = decodeFrame(new Uint8Array(event.data));
                if (result === null || result.consumed !== event.data.byteLength) {
                    this.callbacks.onDecodeError?.();
                    return;
                }
                this.callbacks.onMessage(result.message);
            }
            catch (err) {
                if (err instanceof CodecError) {
                    this.callbacks.onDecodeError?.();
                    return;
                }
                throw err;
            }
        };
        socket.onclose = () => {
            this.socket = null;
            this.callbacks.onStatus("DISCONNECTED");
            this.scheduleRetry();
        };
        socket.onerror = () => {
            socket.close();
        };
    }
    scheduleRetry() {
        if (this.stopped)
            return;
        this.timer = setTimeout(() => this.open(), this.backoff);
        this.backoff = Math.min(this.backoff * 2, BACKOFF_MAX_MS);
    }
}
