"""Command line interface: ``rover run``, ``rover replay``, ``rover worldcheck``."""

from __future__ import annotations

import argparse
import asyncio
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, ServiceConfig, load_config
from .net import ReplayServer, RoverServer
from .service import Simulation, StartupError, parse_script, run_headless
from .session import ReplayError
from .world import WorldError, load_world


def _load_world_file(path: str):
    try:
        return load_world(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise SystemExit(f"rover: cannot read world file: {exc}")
    except WorldError as exc:
        raise SystemExit(f"rover: invalid world file {path}: {exc}")


def _build_config(args) -> ServiceConfig:
    try:
        config = load_config(args.config) if args.config else ServiceConfig()
    except OSError as exc:
        raise SystemExit(f"rover: cannot read config: {exc}")
    except ConfigError as exc:
        raise SystemExit(f"rover: bad config: {exc}")
    overrides = {}
    if args.world:
        overrides["world_path"] = args.world
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.record:
        overrides["record_dir"] = args.record
    if overrides:
        config = replace(config, **overrides)
    if config.world_path is None:
        raise SystemExit("rover: no world file (set 'world =' in the config or pass --world)")
    return config


def _cmd_run(args) -> int:
    config = _build_config(args)
    world = _load_world_file(config.world_path)

    script = {}
    if args.headless_script:
        try:
            script = parse_script(Path(args.headless_script).read_text(encoding="utf-8"))
        except OSError as exc:
            raise SystemExit(f"rover: cannot read script: {exc}")
        except ValueError as exc:
            raise SystemExit(f"rover: bad script: {exc}")

    if args.ticks is not None:
        try:
            sim = Simulation(config, world)
        except StartupError as exc:
            raise SystemExit(f"rover: {exc}")
        run_headless(sim, args.ticks, script)
        sim.close()
        pose = sim.pose
        print(
            f"ran {args.ticks} ticks: pose=({pose.x:.3f}, {pose.y:.3f}, "
            f"{pose.heading:.3f} rad) battery={sim.battery.voltage:.2f} V"
        )
        return 0

    if script:
        raise SystemExit("rover: --headless-script requires --ticks")

    async def serve() -> None:
        try:
            server = RoverServer(config, world)
        except StartupError as exc:
            raise SystemExit(f"rover: {exc}")
        try:
            await server.start()
        except OSError as exc:
            raise SystemExit(f"rover: cannot listen: {exc}")
        print(
            f"rover: tcp on {server.tcp_port}, ws/http on {server.ws_port} (Ctrl-C to stop)",
            flush=True,
        )
        try:
            await server.finished.wait()
        finally:
            await server.stop()

    try:
        asyncio.run(serve())
    except KeyboardInterrupt:
        print("rover: stopped")
    return 0


def _cmd_replay(args) -> int:
    async def serve() -> None:
        try:
            server = ReplayServer(args.log, args.listen_ws, tick_hz=args.tick_hz)
        except (OSError, ReplayError) as exc:
            raise SystemExit(f"rover: cannot replay: {exc}")
        try:
            await server.start()
        except OSError as exc:
            raise SystemExit(f"rover: cannot listen: {exc}")
        print(
            f"rover: replaying {args.log} on ws/http port {server.ws_port} (Ctrl-C to stop)",
            flush=True,
        )
        try:
            await asyncio.Event().wait()
        finally:
            await server.stop()

    try:
        asyncio.run(serve())
    except KeyboardInterrupt:
        print("rover: stopped")
    return 0


def _cmd_worldcheck(args) -> int:
    world = _load_world_file(args.file)
    b = world.bounds
    print(f"OK: bounds {b.w:g}x{b.h:g} m, {len(world.obstacles)} obstacle(s)")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="rover", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the simulated rover")
    run.add_argument("--config", help="service config file (key = value lines)")
    run.add_argument("--world", help="world file (overrides config)")
    run.add_argument("--seed", type=int, help="rng seed (overrides config)")
    run.add_argument("--record", help="session/snapshot directory (overrides config)")
    run.add_argument("--headless-script", help="scripted commands: '<tick> <frame hex>' lines")
    run.add_argument("--ticks", type=int, help="run N ticks headless (no network) and exit")
    run.set_defaults(func=_cmd_run)

    replay = sub.add_parser("replay", help="re-serve a recorded session")
    replay.add_argument("--log", required=True, help="session log file")
    replay.add_argument("--listen-ws", required=True, help="host:port for ws/http")
    replay.add_argument("--tick-hz", type=int, default=50, help="original tick rate")
    replay.set_defaults(func=_cmd_replay)

    check = sub.add_parser("worldcheck", help="validate a world file")
    check.add_argument("file")
    check.set_defaults(func=_cmd_worldcheck)

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
