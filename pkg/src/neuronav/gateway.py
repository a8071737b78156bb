"""Live service: one paced session engine, many console clients.

Clients speak the JSON protocol over a WebSocket, or over a raw TCP socket
with one JSON object per line for headless tooling.  Every connection gets
a hello, then decimated state snapshots.  Commands land in a latest-wins
register (one slot per command type) that the engine drains between ticks,
so a flood of joystick packets costs one application and client speed can
never stall the loop; each client's outbound mailbox is a bounded deque
that drops the oldest snapshot on overflow.
"""

from __future__ import annotations

import asyncio
import json
import logging
from collections import deque
from collections.abc import Awaitable, Callable
from dataclasses import dataclass, replace
from http import HTTPStatus
from pathlib import Path

from websockets.asyncio.server import serve as ws_serve
from websockets.datastructures import Headers
from websockets.exceptions import ConnectionClosed
from websockets.http11 import Response

from .geometry import Vec2
from .intent import ProfileError, TrainingProfile, list_profiles, load_profile, save_profile
from .protocol import (
    Command,
    IntentPower,
    Joystick,
    LoadScenario,
    ProfileLoad,
    ProfileSave,
    ProtocolError,
    Reset,
    SetMode,
    SetTarget,
    SetThreshold,
    encode_command,
    error_message,
    hello_message,
    parse_command,
    state_message,
)
from .scenarios import builtin_scenarios
from .session import CommandRejected, Session, SessionConfig
from .world import ScenarioError, scenario_from_json, validate_scenario

log = logging.getLogger(__name__)

MAILBOX_LIMIT = 8

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".svg": "image/svg+xml",
    ".json": "application/json",
    ".map": "application/json",
}


@dataclass
class GatewayConfig:
    session: SessionConfig
    host: str = "127.0.0.1"
    port: int = 8765
    tcp_port: int | None = None  # None: port + 1 once the port is known
    decimation: int = 2
    strict_bci: bool = False
    pace: bool = True  # False: free-run (tests)
    ui_dir: Path | None = None  # serve this directory over plain HTTP GETs


class _Client:
    """Outbound half of one connection: bounded mailbox plus a wake flag."""

    def __init__(self) -> None:
        self.mailbox: deque[str] = deque(maxlen=MAILBOX_LIMIT)
        self.wake = asyncio.Event()
        self.closed = False

    def push(self, payload: str) -> None:
        self.mailbox.append(payload)  # deque drops the oldest when full
        self.wake.set()

    async def drain(self, send: Callable[[str], Awaitable[None]]) -> None:
        """Feed ``send`` from the mailbox until the connection dies."""
        while not self.closed:
            await self.wake.wait()
            self.wake.clear()
            while self.mailbox:
                payload = self.mailbox.popleft()
                try:
                    await send(payload)
                except (ConnectionClosed, ConnectionError, OSError):
                    self.closed = True
                    return


class Gateway:
    """Runs the engine task and both listeners; owns all live state."""

    def __init__(self, config: GatewayConfig):
        self.config = config
        self.session = Session(config.session)
        self._register: dict[str, tuple[Command, _Client | None]] = {}
        self._clients: set[_Client] = set()
        self._ws_server = None
        self._tcp_server = None
        self._engine_task: asyncio.Task | None = None
        self.ws_port: int | None = None
        self.tcp_port: int | None = None

    # -- lifecycle -------------------------------------------------------------

    async def start(self) -> None:
        cfg = self.config
        self._ws_server = await ws_serve(
            self._ws_handler,
            cfg.host,
            cfg.port,
            process_request=self._process_request,
        )
        self.ws_port = self._ws_server.sockets[0].getsockname()[1]
        tcp_port = cfg.tcp_port if cfg.tcp_port is not None else self.ws_port + 1
        self._tcp_server = await asyncio.start_server(
            self._tcp_handler, cfg.host, tcp_port
        )
        self.tcp_port = self._tcp_server.sockets[0].getsockname()[1]
        self._engine_task = asyncio.create_task(self._engine())

    async def stop(self) -> None:
        if self._engine_task:
            self._engine_task.cancel()
            try:
                await self._engine_task
            except asyncio.CancelledError:
                pass
        for server in (self._ws_server, self._tcp_server):
            if server:
                server.close()
                await server.wait_closed()
        for client in self._clients:
            client.closed = True
            client.wake.set()

    # -- engine ----------------------------------------------------------------

    async def _engine(self) -> None:
        loop = asyncio.get_running_loop()
        period = self.session.dt
        next_deadline = loop.time() + period
        while True:
            self._apply_register()
            if self.session.status == "running":
                self.session.tick()
                if (
                    self.session.tick_index % self.config.decimation == 0
                    or self.session.status != "running"
                ):
                    self._broadcast(json.dumps(state_message(self.session)))
            if self.config.pace:
                await asyncio.sleep(max(next_deadline - loop.time(), 0.0))
                next_deadline += period
            else:
                await asyncio.sleep(0)

    def _apply_register(self) -> None:
        commands = list(self._register.values())
        self._register.clear()
        for command, client in commands:
            try:
                self._apply(command)
            except (CommandRejected, ProfileError, ProtocolError) as exc:
                if client is not None:
                    client.push(json.dumps(error_message(str(exc))))
            except ScenarioError as exc:
                if client is not None:
                    lines = "; ".join(str(v) for v in exc.violations)
                    client.push(json.dumps(error_message(lines)))

    def _apply(self, command: Command) -> None:
        session = self.session
        if isinstance(command, SetMode):
            session.set_mode(command.mode)
        elif isinstance(command, Joystick):
            session.set_joystick(command.x, command.y)
        elif isinstance(command, IntentPower):
            session.push_power(command.power)
        elif isinstance(command, SetThreshold):
            session.set_threshold(command.value)
        elif isinstance(command, SetTarget):
            session.set_target(Vec2(command.x, command.y))
        elif isinstance(command, LoadScenario):
            if command.name is not None:
                library = builtin_scenarios()
                if command.name not in library:
                    raise CommandRejected(
                        f"no scenario named {command.name!r}; "
                        f"have {sorted(library)}"
                    )
                scenario = library[command.name]
            else:
                scenario = validate_scenario(scenario_from_json(command.document))
            self._swap_session(replace(self.config.session, scenario=scenario))
        elif isinstance(command, Reset):
            self._swap_session(self.config.session)
        elif isinstance(command, ProfileSave):
            params = self.session.intent_params
            save_profile(
                TrainingProfile(
                    name=command.name,
                    threshold=params.threshold,
                    hysteresis=params.hysteresis,
                    smoothing_alpha=params.smoothing_alpha,
                )
            )
            self._broadcast(json.dumps(self._profiles_message()))
        elif isinstance(command, ProfileLoad):
            self.session.apply_profile(load_profile(command.name))

    def _swap_session(self, config: SessionConfig) -> None:
        self.config.session = config
        self.session = Session(config)
        self._broadcast(json.dumps(self._hello()))

    # -- messages ----------------------------------------------------------------

    def _hello(self) -> dict:
        doc = hello_message(
            self.session.scenario, self.config.decimation, self.config.strict_bci
        )
        doc["profiles"] = list_profiles()
        return doc

    def _profiles_message(self) -> dict:
        return {"type": "profiles", "names": list_profiles()}

    def _broadcast(self, payload: str) -> None:
        for client in self._clients:
            client.push(payload)

    def _receive(self, raw: str | bytes, client: _Client) -> None:
        """One inbound frame: parse now, queue for the next tick boundary."""
        try:
            obj = json.loads(raw)
            command = parse_command(obj)
        except json.JSONDecodeError as exc:
            client.push(json.dumps(error_message(f"not JSON: {exc.msg}")))
            return
        except ProtocolError as exc:
            client.push(json.dumps(error_message(str(exc))))
            return
        if isinstance(command, SetTarget) and self.config.strict_bci:
            client.push(
                json.dumps(
                    error_message("set_target is disabled in strict BCI sessions")
                )
            )
            return
        self._register[encode_command(command)["type"]] = (command, client)

    # -- transports --------------------------------------------------------------

    async def _ws_handler(self, connection) -> None:
        client = _Client()
        client.push(json.dumps(self._hello()))
        self._clients.add(client)
        writer = asyncio.create_task(client.drain(connection.send))
        try:
            async for raw in connection:
                self._receive(raw, client)
        except (ConnectionClosed, ConnectionError, OSError):
            pass
        finally:
            client.closed = True
            client.wake.set()
            writer.cancel()
            self._clients.discard(client)

    async def _tcp_handler(self, reader, writer) -> None:
        client = _Client()

        async def send(payload: str) -> None:
            writer.write(payload.encode() + b"\n")
            await writer.drain()

        client.push(json.dumps(self._hello()))
        self._clients.add(client)
        sender = asyncio.create_task(client.drain(send))
        try:
            while line := await reader.readline():
                self._receive(line, client)
        except (ConnectionError, OSError):
            pass
        finally:
            client.closed = True
            client.wake.set()
            sender.cancel()
            self._clients.discard(client)
            writer.close()

    def _process_request(self, connection, request):
        """Serve the console bundle over plain HTTP when configured."""
        if "Upgrade" in request.headers:
            return None
        ui_dir = self.config.ui_dir
        if ui_dir is None:
            return connection.respond(
                HTTPStatus.NOT_FOUND, "websocket endpoint only\n"
            )
        name = request.path.lstrip("/") or "index.html"
        path = (ui_dir / name).resolve()
        if not path.is_relative_to(ui_dir.resolve()) or not path.is_file():
            return connection.respond(HTTPStatus.NOT_FOUND, "no such file\n")
        content_type = _CONTENT_TYPES.get(path.suffix, "application/octet-stream")
        body = path.read_bytes()
        headers = Headers(
            [("Content-Type", content_type), ("Content-Length", str(len(body)))]
        )
        return Response(HTTPStatus.OK.value, HTTPStatus.OK.phrase, headers, body)


async def serve_forever(config: GatewayConfig) -> None:
    """Run the gateway until cancelled (the CLI's serve subcommand)."""
    gateway = Gateway(config)
    await gateway.start()
    log.info(
        "serving ws://%s:%d (tcp fallback on %d)",
        config.host,
        gateway.ws_port,
        gateway.tcp_port,
    )
    try:
        await asyncio.Future()
    finally:
        await gateway.stop()
