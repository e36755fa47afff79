/** Past-session browsing: list logs over HTTP and replay one locally. */

import { CodecError, decodeFrame, type Message } from "./codec.js";

const LOG_MAGIC = "WOSLOG1\n";

export async function fetchSessionList(base: string): Promise<string[]> {
  const resp = await fetch(`${base}/sessions`);
  if (!resp.ok) throw new Error(`GET /sessions: ${resp.status}`);
  const text = await resp.text();
  return text.split("\n").filter((line) => line.length > 0);
}

export async function fetchSessionLog(base: string, name: string): Promise<Uint8Array> {
  const resp = await fetch(`${base}/sessions/${encodeURIComponent(name)}`);
  if (!resp.ok) throw new Error(`GET /sessions/${name}: ${resp.status}`);
  return new Uint8Array(await resp.arrayBuffer());
}

/** Parse a whole session log file into its message sequence. */
export function parseSessionLog(data: Uint8Array): Message[] {
  const header = new TextDecoder().decode(data.slice(0, LOG_MAGIC.length));
  if (header !== LOG_MAGIC) {
    throw new CodecError("bad session log header");
  }
  const messages: Message[] = [];
  let offset = LOG_MAGIC.length;
  while (offset < data.length) {
    const result = decodeFrame(data.subarray(offset));
    if (result === null) throw new CodecError(`truncated record at offset ${offset}`);
    messages.push(result.message);
    offset += result.consumed;
  }
  return messages;
}

/**
 * Feed a recorded message sequence to a sink at original tick pacing.
 * Returns a cancel function.
 */
export function playSession(
  messages: Message[],
  tickHz: number,
  sink: (msg: Message) => void,
  done?: () => void,
): () => void {
  let index = 0;
  let timer: ReturnType<typeof setTimeout> | null = null;
  const tickMs = 1000 / tickHz;

  const pump = () => {
    if (index >= messages.length) {
      done?.();
      return;
    }
    const current = messages[index];
    const tick = "tick" in current ? current.tick : 0n;
    while (index < messages.length) {
      const msg = messages[index];
      const msgTick = "tick" in msg ? msg.tick : tick;
      if (msgTick !== tick) break;
      sink(msg);
      index++;
    }
    if (index < messages.length) {
      const next = messages[index];
      const nextTick = "tick" in next ? next.tick : tick;
      const delay = Number(nextTick - tick) * tickMs;
      timer = setTimeout(pump, Math.max(delay, 0));
    } else {
      done?.();
    }
  };
  pump();
  return () => {
    if (timer) clearTimeout(timer);
  };
}
