"""Network frontends for the simulation: raw TCP, WebSocket, and HTTP.

One asyncio event loop owns everything. The simulation advances in a paced
tick task; connection handlers only exchange messages with it through the
hub's inbound list and per-connection outbound queues, so no lock is ever
needed.

Backpressure: outbound queues are bounded. When one fills up, the oldest
queued video frame is evicted first; telemetry and events are never
dropped. A consumer too slow to take even those is disconnected.
"""

from __future__ import annotations

import asyncio
import logging
import re
from collections import deque
from pathlib import Path
from typing import Awaitable, Callable

from aiohttp import WSMsgType, web

from . import protocol
from .config import ServiceConfig
from .protocol import DecodeError, Event, Message, StreamDecoder, VideoFrame, decode, encode
from .service import Simulation
from .session import read_session
from .world import World

log = logging.getLogger("roversim.net")

QUEUE_LIMIT = 64
_SESSION_NAME = re.compile(r"^[\w.-]+$")

_CMD_TYPES = {
    protocol.CmdDrive: protocol.T_CMD_DRIVE,
    protocol.CmdMode: protocol.T_CMD_MODE,
    protocol.CmdRecord: protocol.T_CMD_RECORD,
}


class Connection:
    """One console link (TCP or WS) with a bounded outbound queue."""

    def __init__(self, name: str, send: Callable[[bytes], Awaitable[None]],
                 close: Callable[[], None]):
        self.name = name
        self._send = send
        self._close = close
        self.queue: deque[tuple[bool, bytes]] = deque()
        self.wake = asyncio.Event()
        self.closed = False
        self.writer_task: asyncio.Task | None = None

    def enqueue(self, is_video: bool, data: bytes) -> None:
        if self.closed:
            return
        if len(self.queue) >= QUEUE_LIMIT:
            for i, (queued_video, _) in enumerate(self.queue):
                if queued_video:
                    del self.queue[i]
                    break
            else:
                if is_video:
                    return  # stale video is the only droppable traffic
                log.warning("connection %s too slow even for telemetry; closing", self.name)
                self.close()
                return
        self.queue.append((is_video, data))
        self.wake.set()

    def close(self) -> None:
        if not self.closed:
            self.closed = True
            self.wake.set()
            self._close()

    async def run_writer(self) -> None:
        try:
            while not self.closed:
                if not self.queue:
                    self.wake.clear()
                    await self.wake.wait()
                    continue
                _, data = self.queue.popleft()
                await self._send(data)
        except asyncio.CancelledError:
            raise
        except Exception:
            pass
        finally:
            self.close()


class Hub:
    """Connection registry, driver/observer arbitration, broadcast fan-out."""

    def __init__(self, tick_source: Callable[[], int]):
        self.connections: list[Connection] = []
        self.inbound: deque[Message] = deque()
        self._tick = tick_source

    @property
    def driver(self) -> Connection | None:
        return self.connections[0] if self.connections else None

    def attach(self, conn: Connection) -> None:
        self.connections.append(conn)
        role = 0 if self.driver is conn else 1
        conn.enqueue(False, encode(Event(self._tick(), protocol.EV_ROLE, role)))

    def detach(self, conn: Connection) -> None:
        was_driver = self.driver is conn
        if conn in self.connections:
            self.connections.remove(conn)
        if was_driver and self.connections:
            promoted = self.connections[0]
            promoted.enqueue(False, encode(Event(self._tick(), protocol.EV_ROLE, 0)))

    def handle_inbound(self, conn: Connection, msg: Message) -> None:
        wire_type = _CMD_TYPES.get(type(msg))
        if wire_type is not None and conn is not self.driver:
            conn.enqueue(
                False, encode(Event(self._tick(), protocol.EV_CMD_REJECTED, wire_type))
            )
            return
        self.inbound.append(msg)

    def drain_inbound(self) -> list[Message]:
        items = list(self.inbound)
        self.inbound.clear()
        return items

    def broadcast(self, frames: list[tuple[bool, bytes]]) -> None:
        for conn in list(self.connections):
            for is_video, data in frames:
                conn.enqueue(is_video, data)

    def close_all(self) -> None:
        for conn in list(self.connections):
            conn.close()


# --------------------------------------------------------------- transports

async def _tcp_handler(hub: Hub, reader: asyncio.StreamReader,
                       writer: asyncio.StreamWriter) -> None:
    peer = writer.get_extra_info("peername")

    async def send(data: bytes) -> None:
        writer.write(data)
        await writer.drain()

    conn = Connection(f"tcp:{peer}", send, lambda: writer.close())
    hub.attach(conn)
    conn.writer_task = asyncio.ensure_future(conn.run_writer())
    decoder = StreamDecoder()
    try:
        while True:
            data = await reader.read(65536)
            if not data:
                break
            for msg in decoder.feed(data):
                hub.handle_inbound(conn, msg)
    except (ConnectionError, DecodeError):
        pass
    finally:
        hub.detach(conn)
        conn.close()
        if conn.writer_task:
            conn.writer_task.cancel()


def _ws_routes(hub: Hub) -> Callable:
    async def handler(request: web.Request) -> web.StreamResponse:
        ws = web.WebSocketResponse()
        await ws.prepare(request)

        async def send(data: bytes) -> None:
            await ws.send_bytes(data)

        conn = Connection(f"ws:{request.remote}", send, lambda: None)
        hub.attach(conn)
        conn.writer_task = asyncio.ensure_future(conn.run_writer())
        try:
            async for msg in ws:
                if msg.type != WSMsgType.BINARY:
                    continue
                try:
                    result = decode(msg.data)
                except DecodeError:
                    break
                if result is None or result[1] != len(msg.data):
                    break  # one complete wire frame per WS message
                hub.handle_inbound(conn, result[0])
        finally:
            hub.detach(conn)
            conn.close()
            if conn.writer_task:
                conn.writer_task.cancel()
            await ws.close()
        return ws

    return handler


# ------------------------------------------------------------------- HTTP

def _http_routes(app: web.Application, record_dir: str | None, static_dir: Path) -> None:
    async def sessions_list(request: web.Request) -> web.Response:
        names: list[str] = []
        if record_dir and Path(record_dir).is_dir():
            names = sorted(p.name for p in Path(record_dir).glob("*.woslog"))
        body = "\n".join(names) + ("\n" if names else "")
        return web.Response(text=body, content_type="text/plain")

    async def session_file(request: web.Request) -> web.Response:
        name = request.match_info["name"]
        if not _SESSION_NAME.match(name) or not record_dir:
            raise web.HTTPNotFound()
        path = Path(record_dir) / name
        if not path.is_file():
            raise web.HTTPNotFound()
        return web.Response(body=path.read_bytes(), content_type="application/octet-stream")

    async def index(request: web.Request) -> web.Response:
        path = static_dir / "index.html"
        if not path.is_file():
            raise web.HTTPNotFound()
        return web.Response(body=path.read_bytes(), content_type="text/html")

    async def asset(request: web.Request) -> web.Response:
        rel = request.match_info["name"]
        parts = rel.split("/")
        if not all(_SESSION_NAME.match(p) for p in parts):
            raise web.HTTPNotFound()
        path = static_dir.joinpath(*parts)
        if not path.is_file():
            raise web.HTTPNotFound()
        ctype = "text/plain"
        if rel.endswith(".html"):
            ctype = "text/html"
        elif rel.endswith(".js"):
            ctype = "application/javascript"
        elif rel.endswith(".css"):
            ctype = "text/css"
        elif rel.endswith(".map") or rel.endswith(".json"):
            ctype = "application/json"
        return web.Response(body=path.read_bytes(), content_type=ctype)

    app.router.add_get("/sessions", sessions_list)
    app.router.add_get("/sessions/{name}", session_file)
    app.router.add_get("/", index)
    app.router.add_get("/{name:[^{}]+}", asset)


def _parse_addr(addr: str) -> tuple[str, int]:
    host, _, port = addr.rpartition(":")
    return host or "127.0.0.1", int(port)


def _static_dir(config: ServiceConfig) -> Path:
    if config.static_dir:
        return Path(config.static_dir)
    return Path(__file__).parent / "static"


# ------------------------------------------------------------ live server

class RoverServer:
    """Live rover: paced simulation plus TCP/WS/HTTP endpoints."""

    def __init__(self, config: ServiceConfig, world: World):
        self.config = config
        self.sim = Simulation(config, world)
        self.hub = Hub(lambda: self.sim.tick_index)
        self.max_ticks: int | None = None
        self._tcp_server: asyncio.AbstractServer | None = None
        self._runner: web.AppRunner | None = None
        self._tick_task: asyncio.Task | None = None
        self.tcp_port = 0
        self.ws_port = 0
        self.finished = asyncio.Event()

    async def start(self) -> None:
        tcp_host, tcp_port = _parse_addr(self.config.listen_tcp)
        self._tcp_server = await asyncio.start_server(
            lambda r, w: _tcp_handler(self.hub, r, w), tcp_host, tcp_port
        )
        self.tcp_port = self._tcp_server.sockets[0].getsockname()[1]

        app = web.Application()
        app.router.add_get("/ws", _ws_routes(self.hub))
        _http_routes(app, self.config.record_dir, _static_dir(self.config))
        ws_host, ws_port = _parse_addr(self.config.listen_ws)
        self._runner = web.AppRunner(app)
        await self._runner.setup()
        site = web.TCPSite(self._runner, ws_host, ws_port)
        await site.start()
        self.ws_port = self._runner.addresses[0][1]

        self._tick_task = asyncio.ensure_future(self._run_ticks())
        log.info("rover listening: tcp=%s ws/http=%s", self.tcp_port, self.ws_port)

    async def _run_ticks(self) -> None:
        loop = asyncio.get_event_loop()
        period = self.config.dt
        next_time = loop.time() + period
        try:
            while self.max_ticks is None or self.sim.tick_index < self.max_ticks:
                emits = self.sim.step(self.hub.drain_inbound())
                if emits and self.hub.connections:
                    frames = [(isinstance(m, VideoFrame), encode(m)) for m in emits]
                    self.hub.broadcast(frames)
                delay = next_time - loop.time()
                if delay > 0:
                    await asyncio.sleep(delay)
                else:
                    next_time = loop.time()  # fell behind; don't spiral
                    await asyncio.sleep(0)
                next_time += period
        finally:
            self.finished.set()

    async def stop(self) -> None:
        if self._tick_task:
            self._tick_task.cancel()
            try:
                await self._tick_task
            except asyncio.CancelledError:
                pass
        self.hub.close_all()
        if self._tcp_server:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
        if self._runner:
            await self._runner.cleanup()
        self.sim.close()


# ---------------------------------------------------------- replay server

class ReplayServer:
    """Re-serves a recorded session to consoles at original tick pacing."""

    def __init__(self, log_path: str, listen_ws: str, tick_hz: int = 50,
                 record_dir: str | None = None, static_dir: str | None = None):
        self.log_path = log_path
        self.listen_ws = listen_ws
        self.tick_hz = tick_hz
        self.record_dir = record_dir if record_dir is not None else str(Path(log_path).parent)
        self.static_path = Path(static_dir) if static_dir else Path(__file__).parent / "static"
        self._runner: web.AppRunner | None = None
        self.ws_port = 0
        # fail fast on unreadable logs before serving anything
        self.records: list[Message] = list(read_session(log_path))

    async def _ws_handler(self, request: web.Request) -> web.StreamResponse:
        ws = web.WebSocketResponse()
        await ws.prepare(request)
        await ws.send_bytes(encode(Event(0, protocol.EV_ROLE, 1)))
        period = 1.0 / self.tick_hz
        last_tick: int | None = None
        try:
            for msg in self.records:
                tick = getattr(msg, "tick", last_tick or 0)
                if last_tick is not None and tick > last_tick:
                    await asyncio.sleep((tick - last_tick) * period)
                last_tick = tick
                await ws.send_bytes(encode(msg))
            await ws.close()
        except ConnectionError:
            pass
        return ws

    async def start(self) -> None:
        app = web.Application()
        app.router.add_get("/ws", self._ws_handler)
        _http_routes(app, self.record_dir, self.static_path)
        host, port = _parse_addr(self.listen_ws)
        self._runner = web.AppRunner(app)
        await self._runner.setup()
        site = web.TCPSite(self._runner, host, port)
        await site.start()
        self.ws_port = self._runner.addresses[0][1]
        log.info("replaying %s on ws/http=%s", self.log_path, self.ws_port)

    async def stop(self) -> None:
        if self._runner:
            await self._runner.cleanup()
