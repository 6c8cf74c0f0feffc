"""TCP transport: line-delimited messages over asyncio streams.

Players hold two connections (referee, source); there is no socket between
the players or between referee and source. Each service runs its actor on a
single task fed by one queue, so message handling stays sequential.
"""
from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass

from .actors import BellCollector, Player, Referee, Source
from .inproc import GameConfig, make_player, make_referee, make_source
from .stats import game_stats
from .wire import HELLO, REFEREE, ROLES, SOURCE, Message, ProtocolError, WireError, check_route, decode

log = logging.getLogger(__name__)

_EOF = object()


class TransportError(ProtocolError):
    pass


def parse_endpoint(endpoint: str) -> tuple[str, int]:
    host, sep, port = endpoint.rpartition(":")
    if not sep or not host or not port.isdigit():
        raise ValueError(f"endpoint must look like host:port, got {endpoint!r}")
    return host, int(port)


async def _send(writer: asyncio.StreamWriter, msg: Message) -> None:
    writer.write(msg.encode().encode("utf-8"))
    await writer.drain()


async def _pump(reader: asyncio.StreamReader, tag: str, queue: asyncio.Queue) -> None:
    """Forward decoded lines from ``reader`` into ``queue`` until EOF."""
    try:
        while True:
            line = await reader.readline()
            if not line:
                break
            try:
                await queue.put((tag, decode(line)))
            except WireError as exc:
                await queue.put((tag, exc))
                break
    except (ConnectionError, asyncio.IncompleteReadError):
        pass
    await queue.put((tag, _EOF))


async def _read_hello(reader, timeout: float) -> Message:
    line = await asyncio.wait_for(reader.readline(), timeout)
    if not line:
        raise TransportError("connection closed before hello")
    msg = decode(line)
    if msg.kind != HELLO or msg.role is None:
        raise ProtocolError(f"expected hello with a role, got {msg.kind}")
    return msg


def _close(writer) -> None:
    try:
        writer.close()
    except (ConnectionError, RuntimeError):
        pass


class _Service:
    """Accepts player connections and registers them by role."""

    name = "service"

    def __init__(self, host: str, port: int, hello_timeout: float = 10.0):
        self.host, self.port = host, port
        self.hello_timeout = hello_timeout
        self.queue: asyncio.Queue = asyncio.Queue()
        self.conns: dict[str, asyncio.StreamWriter] = {}
        self.server = None
        self.rejected: list[str] = []

    async def start(self) -> int:
        self.server = await asyncio.start_server(self._accept, self.host, self.port)
        self.port = self.server.sockets[0].getsockname()[1]
        return self.port

    async def _accept(self, reader, writer) -> None:
        try:
            hello = await _read_hello(reader, self.hello_timeout)
        except (ProtocolError, asyncio.TimeoutError, ConnectionError) as exc:
            self.rejected.append(str(exc))
            log.warning("%s rejected connection: %s", self.name, exc)
            _close(writer)
            return
        role = hello.role
        if role in self.conns:
            self.rejected.append(f"duplicate role {role}")
            log.warning("%s rejected duplicate role %s", self.name, role)
            _close(writer)
            return
        self.conns[role] = writer
        await self.queue.put((role, hello))
        await _pump(reader, role, self.queue)

    async def deliver(self, sender: str, outputs) -> None:
        for dest, msg in outputs:
            check_route(sender, dest)
            writer = self.conns.get(dest)
            if writer is None:
                log.debug("%s: no connection to %s, dropping %s", self.name, dest, msg.kind)
                continue
            try:
                await _send(writer, msg)
            except ConnectionError:
                self.conns.pop(dest, None)

    async def close(self) -> None:
        for writer in list(self.conns.values()):
            _close(writer)
        self.conns.clear()
        if self.server is not None:
            self.server.close()
            await self.server.wait_closed()


class RefereeService(_Service):
    name = REFEREE

    def __init__(self, actor: Referee, host: str, port: int, round_timeout: float = 5.0,
                 registration_timeout: float | None = None):
        super().__init__(host, port)
        self.actor = actor
        self.round_timeout = round_timeout
        self.registration_timeout = registration_timeout
        self.aborted = False

    async def run(self):
        loop = asyncio.get_running_loop()
        actor = self.actor
        deadline = None if self.registration_timeout is None else loop.time() + self.registration_timeout
        current = actor.round
        while not actor.finished:
            timeout = None if deadline is None else max(0.0, deadline - loop.time())
            try:
                role, item = await asyncio.wait_for(self.queue.get(), timeout)
            except asyncio.TimeoutError:
                if not actor.registered or len(actor.registered) < len(ROLES):
                    raise TransportError("players did not register in time")
                log.warning("round %d timed out; recording it as incomplete", actor.round)
                await self.deliver(REFEREE, actor.abort_round())
            else:
                if item is _EOF or isinstance(item, Exception):
                    if actor.finished:
                        break
                    log.error("lost connection to %s: %s", role, item if item is not _EOF else "EOF")
                    self.conns.pop(role, None)
                    self.aborted = True
                    await self.deliver(REFEREE, actor.stop())
                    break
                await self.deliver(REFEREE, actor.handle(role, item))
            if actor.round != current:
                current = actor.round
                deadline = loop.time() + self.round_timeout
        await asyncio.sleep(0)
        await self.close()
        return actor.records


class SourceService(_Service):
    name = SOURCE

    def __init__(self, actor: Source, host: str, port: int):
        super().__init__(host, port)
        self.actor = actor

    async def run(self) -> None:
        while len(self.actor.finished) < len(ROLES):
            role, item = await self.queue.get()
            if item is _EOF or isinstance(item, Exception):
                self.conns.pop(role, None)
                continue
            await self.deliver(SOURCE, self.actor.handle(role, item))
        await self.close()


class PlayerClient:
    def __init__(self, player: Player, referee: tuple[str, int], source: tuple[str, int] | None,
                 connect_timeout: float = 10.0, retry_interval: float = 0.05):
        self.player = player
        self.referee_addr = referee
        self.source_addr = source
        self.connect_timeout = connect_timeout
        self.retry_interval = retry_interval
        self.queue: asyncio.Queue = asyncio.Queue()
        self.writers: dict[str, asyncio.StreamWriter] = {}
        self._tasks: list[asyncio.Task] = []
        self.source_reconnects = 0

    async def _connect(self, addr) -> tuple:
        loop = asyncio.get_running_loop()
        deadline = loop.time() + self.connect_timeout
        while True:
            try:
                return await asyncio.open_connection(*addr)
            except OSError:
                if loop.time() > deadline:
                    raise TransportError(f"could not connect to {addr[0]}:{addr[1]}")
                await asyncio.sleep(self.retry_interval)

    async def _attach(self, tag: str, addr) -> None:
        reader, writer = await self._connect(addr)
        self.writers[tag] = writer
        self._tasks.append(asyncio.create_task(_pump(reader, tag, self.queue)))
        await _send(writer, Message(HELLO, 0, role=self.player.role))

    async def _reattach_source(self) -> None:
        try:
            await self._attach(SOURCE, self.source_addr)
            self.source_reconnects += 1
        except TransportError as exc:
            log.error("%s: %s", self.player.role, exc)

    async def run(self) -> Player:
        player = self.player
        await self._attach(REFEREE, self.referee_addr)
        if player.quantum:
            await self._attach(SOURCE, self.source_addr)
        acked = False
        try:
            while not player.finished:
                tag, item = await self.queue.get()
                if item is _EOF or isinstance(item, Exception):
                    self.writers.pop(tag, None)
                    if tag == REFEREE:
                        if not acked:
                            raise ProtocolError(f"{player.role} was rejected by the referee")
                        raise TransportError(f"{player.role} lost the referee connection")
                    if not player.finished:
                        self._tasks.append(asyncio.create_task(self._reattach_source()))
                    continue
                if tag == REFEREE and item.kind == HELLO:
                    acked = True
                for dest, msg in player.handle(tag, item):
                    check_route(player.role, dest)
                    writer = self.writers.get(dest)
                    if writer is None:
                        log.debug("%s: %s unavailable, dropping %s", player.role, dest, msg.kind)
                        continue
                    try:
                        await _send(writer, msg)
                    except ConnectionError:
                        self.writers.pop(dest, None)
        finally:
            for writer in self.writers.values():
                _close(writer)
            for task in self._tasks:
                task.cancel()
        return player


@dataclass
class LocalRun:
    records: list
    aborted: bool
    rejected: list


async def play_local(cfg: GameConfig, bell: bool = False, host: str = "127.0.0.1") -> LocalRun:
    """All four parties on localhost sockets within one event loop."""
    actor = BellCollector(cfg.n, cfg.rounds) if bell else make_referee(cfg)
    referee = RefereeService(actor, host, 0, cfg.round_timeout, registration_timeout=30.0)
    ref_port = await referee.start()
    tasks = []
    source_addr = None
    if bell or cfg.strategy == "quantum":
        source = SourceService(make_source(cfg), host, 0)
        source_addr = (host, await source.start())
        tasks.append(asyncio.create_task(source.run()))
    clients = [PlayerClient(make_player(cfg, role, bell=bell), (host, ref_port), source_addr) for role in ROLES]
    tasks += [asyncio.create_task(c.run()) for c in clients]
    records = await referee.run()
    await asyncio.gather(*tasks, return_exceptions=True)
    return LocalRun(records, referee.aborted, referee.rejected)


def run_game_tcp(cfg: GameConfig):
    run = asyncio.run(play_local(cfg))
    return game_stats(cfg.n, run.records, aborted=run.aborted), run.records


def run_bell_tcp(cfg: GameConfig) -> list:
    return asyncio.run(play_local(cfg, bell=True)).records


def serve_referee(endpoint: str, cfg: GameConfig, bell: bool = False, on_listening=None):
    """Run the referee service until the game finishes; returns (stats, records, aborted)."""
    host, port = parse_endpoint(endpoint)

    async def main():
        actor = BellCollector(cfg.n, cfg.rounds) if bell else make_referee(cfg)
        service = RefereeService(actor, host, port, cfg.round_timeout)
        bound = await service.start()
        if on_listening:
            on_listening(host, bound)
        records = await service.run()
        return records, service.aborted

    records, aborted = asyncio.run(main())
    stats = None if bell else game_stats(cfg.n, records, aborted=aborted)
    return stats, records, aborted


def serve_source(endpoint: str, cfg: GameConfig, on_listening=None) -> None:
    host, port = parse_endpoint(endpoint)

    async def main():
        service = SourceService(make_source(cfg), host, port)
        bound = await service.start()
        if on_listening:
            on_listening(host, bound)
        await service.run()

    asyncio.run(main())


def connect_player(referee: str, source: str | None, role: str, cfg: GameConfig, bell: bool = False) -> Player:
    if role not in ROLES:
        raise ValueError(f"unknown role {role!r}")
    player = make_player(cfg, role, bell=bell)
    if player.quantum and source is None:
        raise ValueError("the entangled strategy needs a source endpoint")
    client = PlayerClient(player, parse_endpoint(referee), parse_endpoint(source) if source else None)
    return asyncio.run(client.run())
