"""HTTP + WebSocket front end for live painting sessions.

One stepper thread per session owns the engine; request handlers only
enqueue commands and read state under the session lock. Snapshots go out
every 0.1 simulated seconds carrying the disc stamps deposited since the
previous snapshot, plus a full canvas keyframe every 5 simulated seconds
(and once to every new subscriber). Commands are drained at step
boundaries; each is either acknowledged with the step index at which it
took effect or rejected with a reason, leaving the state untouched.

Frames on the stream socket are {"type": ..., "payload": ...} objects:
server types snapshot | ack | error | done, client type command.
"""
from __future__ import annotations

import asyncio
import base64
import json
import math
import queue
import secrets
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Response, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from swarmbrush.music.timeline import MusicTimeline, TimelineError, timeline_from_dict
from swarmbrush.sim.config import ConfigError, SimConfig, config_from_dict, config_to_dict
from swarmbrush.sim.engine import CommandError, Engine, UserCommand

SNAPSHOT_PERIOD = 0.1   # simulated seconds between snapshots
KEYFRAME_PERIOD = 5.0   # simulated seconds between full canvas frames
MAX_SESSIONS = 32
SUBSCRIBER_QUEUE_LIMIT = 256


def parse_wire_command(payload) -> tuple[str, UserCommand]:
    """Validate a client command payload; returns (command id, command).

    Raises CommandError on anything malformed. Value bounds are not
    checked here: those belong to the engine at the step boundary.
    """
    if not isinstance(payload, dict):
        raise CommandError("command payload must be an object")
    cid = payload.get("id")
    if not isinstance(cid, str) or not cid:
        raise CommandError("command payload needs a string id")
    kind = payload.get("kind")
    allowed = {"set_center": {"id", "kind", "x", "y"},
               "set_l": {"id", "kind", "value"},
               "set_trail_width": {"id", "kind", "value"},
               "pause": {"id", "kind"},
               "resume": {"id", "kind"}}
    if kind not in allowed:
        raise CommandError(f"unknown command kind {kind!r}")
    extra = set(payload) - allowed[kind]
    if extra:
        raise CommandError(f"unexpected command field(s): {sorted(extra)}")

    def number(name: str) -> float:
        value = payload.get(name)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise CommandError(f"{kind} requires numeric {name!r}")
        if not math.isfinite(value):
            raise CommandError(f"{kind} {name!r} must be finite")
        return float(value)

    if kind == "set_center":
        command = UserCommand("set_center", point=(number("x"), number("y")))
    elif kind in ("set_l", "set_trail_width"):
        command = UserCommand(kind, value=number("value"))
    else:
        command = UserCommand(kind)
    return cid, command


@dataclass
class _Subscriber:
    loop: asyncio.AbstractEventLoop
    frames: asyncio.Queue = field(default_factory=lambda: asyncio.Queue(
        maxsize=SUBSCRIBER_QUEUE_LIMIT))
    dead: bool = False

    def offer(self, frame: dict) -> None:
        # Runs on the event loop. A full queue marks the subscriber dead
        # rather than blocking the stepper.
        if self.dead:
            return
        try:
            self.frames.put_nowait(frame)
        except asyncio.QueueFull:
            self.dead = True
            try:
                self.frames.put_nowait(None)
            except asyncio.QueueFull:
                pass  # sender will still see .dead


class Session:
    def __init__(self, sid: str, config: SimConfig, timeline: MusicTimeline,
                 duration: float, pace: float):
        self.id = sid
        self.config = config
        self.timeline = timeline
        self.duration = duration
        self.pace = pace
        self.lock = threading.Lock()
        self.engine = Engine(config, timeline)
        self.state = "running"
        self.commands: queue.SimpleQueue = queue.SimpleQueue()
        self.subscribers: list[_Subscriber] = []
        self.sub_lock = threading.Lock()
        self.stop_event = threading.Event()
        self.seq = 0
        self.pending_stamps: list = []
        self.next_snapshot = SNAPSHOT_PERIOD
        self.next_keyframe = KEYFRAME_PERIOD
        self.thread = threading.Thread(target=self._run, daemon=True,
                                       name=f"session-{sid}")

    # -- wire encoding --------------------------------------------------

    def _encode_stamps(self) -> list:
        out = [[s.robot, s.x, s.y, s.width, s.alpha[0], s.alpha[1], s.alpha[2]]
               for s in self.pending_stamps]
        self.pending_stamps = []
        return out

    def _snapshot_payload(self, keyframe: bytes | None,
                          stamps: list) -> dict:
        e = self.engine
        chord = None
        if e.current_chord is not None:
            chord = {
                "label": e.current_chord.label(),
                "function": e.current_function.value if e.current_function else None,
                "emotions": list(e.current_emotions),
                "color": list(e.current_color.as_tuple()) if e.current_color else None,
            }
        densities = [{
            "pigment": d.color,
            "center": [d.mu[0], d.mu[1]],
            "sigma": [d.sigma[0], d.sigma[1]],
            "k": d.intensity,
        } for d in e.active_densities()]
        robots = [{
            "x": float(r.position[0]),
            "y": float(r.position[1]),
            "theta": float(r.heading),
            "equipment": sorted(r.equipment),
            "alpha": list(e.last_alphas[r.index]),
        } for r in e.robots]
        self.seq += 1
        return {
            "seq": self.seq,
            "step": e.step_index,
            "clock": e.clock,
            "paused": e.paused,
            "state": self.state,
            "l": e.l_value,
            "trail_width": e.trail_width,
            "cost": e.last_cost,
            "chords_consumed": e.chords_consumed,
            "chord": chord,
            "densities": densities,
            "robots": robots,
            "stamps": stamps,
            "keyframe": (None if keyframe is None
                         else {"png_base64": base64.b64encode(keyframe).decode("ascii")}),
        }

    def _broadcast(self, frame: dict) -> None:
        with self.sub_lock:
            subscribers = list(self.subscribers)
        for sub in subscribers:
            if not sub.dead:
                sub.loop.call_soon_threadsafe(sub.offer, frame)

    def subscribe(self, loop: asyncio.AbstractEventLoop) -> _Subscriber:
        """Register a stream consumer; it immediately receives a snapshot
        with a full keyframe so it can render without waiting."""
        sub = _Subscriber(loop)
        with self.lock:
            payload = self._snapshot_payload(self.engine.canvas.render_png(), [])
        sub.offer({"type": "snapshot", "payload": payload})
        with self.sub_lock:
            self.subscribers.append(sub)
        return sub

    def unsubscribe(self, sub: _Subscriber) -> None:
        with self.sub_lock:
            if sub in self.subscribers:
                self.subscribers.remove(sub)

    def enqueue(self, command_id: str, command: UserCommand) -> None:
        self.commands.put((command_id, command))

    def stop(self) -> None:
        self.state = "stopped"
        self.stop_event.set()
        self.thread.join(timeout=10.0)
        self._broadcast(None)  # sentinel: close subscriber streams

    def render_png(self) -> bytes:
        with self.lock:
            return self.engine.canvas.render_png()

    # -- stepper --------------------------------------------------------

    def _drain_commands(self) -> None:
        while True:
            try:
                cid, command = self.commands.get_nowait()
            except queue.Empty:
                return
            with self.lock:
                try:
                    self.engine.apply_command(command)
                    applied_at = self.engine.step_index
                except CommandError as exc:
                    self._broadcast({"type": "error", "payload": {
                        "command_id": cid, "message": str(exc)}})
                    continue
            self._broadcast({"type": "ack", "payload": {
                "command_id": cid, "step": applied_at}})

    def _emit_snapshot(self, with_keyframe: bool) -> None:
        with self.lock:
            keyframe = self.engine.canvas.render_png() if with_keyframe else None
            payload = self._snapshot_payload(keyframe, self._encode_stamps())
        self._broadcast({"type": "snapshot", "payload": payload})

    def _run(self) -> None:
        dt = self.config.dt
        wall_anchor = time.monotonic()
        clock_anchor = self.engine.clock
        was_paused = False
        last_paused_emit = 0.0
        while not self.stop_event.is_set():
            self._drain_commands()
            paused = self.engine.paused
            if paused:
                was_paused = True
                now = time.monotonic()
                if now - last_paused_emit >= SNAPSHOT_PERIOD:
                    self._emit_snapshot(with_keyframe=False)
                    last_paused_emit = now
                self.stop_event.wait(0.01)
                continue
            if was_paused:
                # Re-anchor the pace clock so the pause gap is not replayed.
                wall_anchor = time.monotonic()
                clock_anchor = self.engine.clock
                was_paused = False

            if self.engine.clock >= self.duration - 1e-9:
                break

            with self.lock:
                result = self.engine.step()
                self.pending_stamps.extend(result.stamps)

            if self.engine.clock + 1e-9 >= self.next_snapshot:
                with_keyframe = self.engine.clock + 1e-9 >= self.next_keyframe
                if with_keyframe:
                    self.next_keyframe += KEYFRAME_PERIOD
                self._emit_snapshot(with_keyframe)
                while self.next_snapshot <= self.engine.clock + 1e-9:
                    self.next_snapshot += SNAPSHOT_PERIOD

            lag = (self.engine.clock - clock_anchor) / self.pace \
                - (time.monotonic() - wall_anchor)
            if lag > 0:
                self.stop_event.wait(min(lag, 0.05))

        if not self.stop_event.is_set():
            self._drain_commands()
            self._emit_snapshot(with_keyframe=True)
            self.state = "done"
            self._broadcast({"type": "done", "payload": {
                "step": self.engine.step_index,
                "clock": self.engine.clock,
                "painting_url": f"/sessions/{self.id}/painting.png",
            }})


def create_app() -> FastAPI:
    app = FastAPI(title="swarmbrush session service")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def _error(status: int, message: str) -> JSONResponse:
        return JSONResponse({"detail": message}, status_code=status)

    @app.post("/sessions", status_code=201)
    async def create_session(body: dict):
        if not isinstance(body, dict):
            return _error(400, "request body must be a JSON object")
        unknown = set(body) - {"timeline", "config", "pace", "duration"}
        if unknown:
            return _error(400, f"unknown field(s): {sorted(unknown)}")
        if "timeline" not in body:
            return _error(400, "missing required field 'timeline'")
        try:
            timeline = timeline_from_dict(body["timeline"])
        except TimelineError as exc:
            return _error(400, f"timeline: {exc}")
        try:
            config = config_from_dict(body.get("config", {}))
        except ConfigError as exc:
            return _error(400, f"config: {exc}")
        pace = body.get("pace", 1.0)
        if isinstance(pace, bool) or not isinstance(pace, (int, float)) \
                or not math.isfinite(pace) or pace <= 0:
            return _error(400, "pace must be a positive number")
        duration = body.get("duration", timeline.duration)
        if isinstance(duration, bool) or not isinstance(duration, (int, float)) \
                or not math.isfinite(duration) or duration < 0:
            return _error(400, "duration must be a non-negative number")

        with registry_lock:
            live = sum(1 for s in sessions.values() if s.state != "stopped")
            if live >= MAX_SESSIONS:
                return _error(503, f"session limit reached ({MAX_SESSIONS})")
            sid = secrets.token_hex(8)
            try:
                session = Session(sid, config, timeline, float(duration),
                                  float(pace))
            except (ConfigError, ValueError) as exc:
                return _error(400, str(exc))
            sessions[sid] = session
        session.thread.start()
        return {
            "id": sid,
            "state": session.state,
            "duration": session.duration,
            "pace": session.pace,
            "config": config_to_dict(config),
            "painting_url": f"/sessions/{sid}/painting.png",
            "stream_url": f"/sessions/{sid}/stream",
        }

    @app.get("/sessions")
    async def list_sessions():
        with registry_lock:
            rows = []
            for session in sessions.values():
                rows.append({
                    "id": session.id,
                    "state": session.state,
                    "paused": session.engine.paused,
                    "step": session.engine.step_index,
                    "clock": session.engine.clock,
                    "duration": session.duration,
                })
        rows.sort(key=lambda r: r["id"])
        return {"sessions": rows}

    @app.get("/sessions/{sid}/painting.png")
    async def painting(sid: str):
        with registry_lock:
            session = sessions.get(sid)
        if session is None:
            return _error(404, f"no session {sid!r}")
        png = await asyncio.to_thread(session.render_png)
        return Response(content=png, media_type="image/png")

    @app.delete("/sessions/{sid}", status_code=204)
    async def delete_session(sid: str):
        with registry_lock:
            session = sessions.pop(sid, None)
        if session is None:
            return _error(404, f"no session {sid!r}")
        await asyncio.to_thread(session.stop)
        return Response(status_code=204)

    @app.websocket("/sessions/{sid}/stream")
    async def stream(ws: WebSocket, sid: str):
        await ws.accept()
        with registry_lock:
            session = sessions.get(sid)
        if session is None:
            await ws.send_json({"type": "error", "payload": {
                "command_id": None, "message": f"no session {sid!r}"}})
            await ws.close()
            return
        loop = asyncio.get_running_loop()
        sub = session.subscribe(loop)

        async def sender():
            while True:
                frame = await sub.frames.get()
                if frame is None or sub.dead:
                    break
                await ws.send_text(json.dumps(frame, sort_keys=True))

        send_task = asyncio.create_task(sender())
        try:
            while True:
                try:
                    message = await ws.receive_json()
                except (json.JSONDecodeError, UnicodeDecodeError):
                    sub.offer({"type": "error", "payload": {
                        "command_id": None, "message": "frames must be JSON"}})
                    continue
                if not isinstance(message, dict) or message.get("type") != "command":
                    sub.offer({"type": "error", "payload": {
                        "command_id": None,
                        "message": "client frames must be {type: 'command', payload}"}})
                    continue
                try:
                    cid, command = parse_wire_command(message.get("payload"))
                except CommandError as exc:
                    payload = message.get("payload")
                    cid = payload.get("id") if isinstance(payload, dict) else None
                    sub.offer({"type": "error", "payload": {
                        "command_id": cid if isinstance(cid, str) else None,
                        "message": str(exc)}})
                    continue
                session.enqueue(cid, command)
        except WebSocketDisconnect:
            pass
        finally:
            session.unsubscribe(sub)
            send_task.cancel()

    return app


app = create_app()
