/** WebSocket link to the rover with automatic reconnect. */

import { CodecError, decodeFrame, type Message } from "./codec.js";

export interface LinkCallbacks {
  onMessage(msg: Message): void;
  onStatus(status: "CONNECTING" | "OPEN" | "DISCONNECTED"): void;
  onDecodeError?(): void;
}

const BACKOFF_START_MS = 500;
const BACKOFF_MAX_MS = 8000;

export class RoverLink {
  private socket: WebSocket | null = null;
  private backoff = BACKOFF_START_MS;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;

  constructor(private url: string, private callbacks: LinkCallbacks) {}

  start(): void {
    this.stopped = false;
    this.open();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer) clearTimeout(this.timer);
    this.socket?.close();
    this.socket = null;
  }

  get connected(): boolean {
    return this.socket !== null && this.socket.readyState === WebSocket.OPEN;
  }

  send(frame: Uint8Array): void {
    if (this.connected) this.socket!.send(frame);
  }

  private open(): void {
    this.callbacks.onStatus("CONNECTING");
    const socket = new WebSocket(this.url);
    socket.binaryType = "arraybuffer";
    this.socket = socket;

    socket.onopen = () => {
      this.backoff = BACKOFF_START_MS;
      this.callbacks.onStatus("OPEN");
    };
    socket.onmessage = (event: MessageEvent) => {
      if (!(event.data instanceof ArrayBuffer)) return;
      try {
        const result = decodeFrame(new Uint8Array(event.data));
        if (result === null || result.consumed !== event.data.byteLength) {
          this.callbacks.onDecodeError?.();
          return;
        }
        this.callbacks.onMessage(result.message);
      } catch (err) {
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

  private scheduleRetry(): void {
    if (this.stopped) return;
    this.timer = setTimeout(() => this.open(), this.backoff);
    this.backoff = Math.min(this.backoff * 2, BACKOFF_MAX_MS);
  }
}
