"""Session service: HTTP project CRUD plus a WebSocket command channel.

One service process hosts many independent sessions. Each session owns one
authoritative project, a transport, and a single-writer command queue; every
mutation flows through that queue, so any interleaving of clients is
equivalent to some single-client sequence. Read-only snapshot queries bypass
the queue and observe only fully applied commands.

Wire messages are JSON text. A command is
``{"seq": int, "session": str, "op": str, "args": {...}}``; every command is
answered by exactly one ``ack`` / ``recording-ingest-ack`` / ``error`` event
carrying its seq. Applied edits additionally broadcast a ``state-delta`` to
all connected clients, stamped with the session's strictly increasing
command counter. Malformed envelopes close the connection with a coded
reason; well-formed commands that fail keep it open and answer ``error``.
"""

from __future__ import annotations

import asyncio
import json
import socket
from dataclasses import dataclass, field
from typing import Any

from fastapi import FastAPI, Request, Response, WebSocket, WebSocketDisconnect

from . import __version__
from .dsl import parse_scenario
from .errors import (
    EngineError,
    FrameOutOfSlot,
    InvalidParam,
    InvalidRange,
    LockedTrack,
    MalformedFile,
    PortInUse,
)
from .mathx import q_is_unit
from .persistence import (
    FORMAT_ROWS,
    FORMAT_STRUCTURED,
    load_project,
    save_project,
    write_trace,
)
from .playback import (
    MODE_PLAYING,
    MODE_RECORDING,
    GrabEvent,
    InputSample,
    Player,
    ReleaseEvent,
    TriggerEvent,
    export_trace,
    state_at,
)
from .project import Project
from .scene import SceneState

DEFAULT_PORT = 8787
PORT_ENV_VAR = "REENACT_PORT"

# close codes for protocol violations (4000-range = application defined)
CLOSE_UNKNOWN_SESSION = 4404
CLOSE_PROTOCOL = 4400


# --- documents ----------------------------------------------------------------


def timeline_document(project: Project) -> dict[str, Any]:
    """Compact timeline mirror: enough for a panel to re-render from."""
    return {
        "revision": project.revision,
        "frame_rate": project.frame_rate,
        "duration": project.duration,
        "tracks": [
            {
                "id": t.id,
                "name": t.name,
                "muted": t.muted,
                "locked": t.locked,
                "slots": [
                    {
                        "id": s.id,
                        "start": s.start,
                        "end": s.end,
                        "effects": [
                            {
                                "id": e.id,
                                "type": e.type,
                                "target": e.target_id,
                                "params": dict(e.params),
                                "channels": sorted(e.channels),
                            }
                            for e in s.effects
                        ],
                    }
                    for s in t.slots
                ],
            }
            for t in project.timeline.tracks
        ],
    }


def scene_document(project: Project) -> dict[str, Any]:
    plan = project.scene.floor_plan
    return {
        "objects": [
            {
                "id": o.id,
                "name": o.name,
                "class": o.cls.value,
                "position": list(o.initial.position),
                "triggerable": o.triggerable,
                "states": list(o.states),
                "payload": o.payload,
            }
            for o in project.scene.objects.values()
        ],
        "walls": [[list(w.a), list(w.b)] for w in plan.walls],
        "regions": [
            {"name": r.name, "polygon": [list(p) for p in r.polygon]}
            for r in plan.regions
        ],
        "spawns": {name: list(p) for name, p in plan.spawns.items()},
    }


def state_document(state: SceneState) -> dict[str, Any]:
    objects: dict[str, Any] = {}
    for oid, snap in state.objects.items():
        doc: dict[str, Any] = {
            "position": list(snap.transform.position),
            "rotation": list(snap.transform.rotation),
            "scale": snap.transform.scale,
            "state": snap.state,
            "attached_to": list(snap.attached_to) if snap.attached_to else None,
        }
        if snap.pose is not None:
            doc["pose"] = [list(j) for j in snap.pose]
        if snap.decorations:
            doc["decorations"] = [d.as_dict() for d in snap.decorations]
        objects[oid] = doc
    return {"frame": state.frame, "objects": objects}


# --- sessions -----------------------------------------------------------------


@dataclass
class Session:
    """One authoritative project behind a single-writer command queue."""

    id: str
    project: Project
    player: Player = None  # type: ignore[assignment]
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    applied: int = 0  # strictly increasing count of applied commands
    clients: set = field(default_factory=set)
    recorder: Any = None
    ticker: Any = None

    def __post_init__(self) -> None:
        if self.player is None:
            self.player = Player(self.project)


class SessionRegistry:
    def __init__(self) -> None:
        self.sessions: dict[str, Session] = {}
        self._counter = 0

    def create(self, project: Project) -> Session:
        self._counter += 1
        session = Session(id=f"p{self._counter}", project=project)
        self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSession(f"no session {session_id!r}") from None


class UnknownSession(EngineError):
    code = "UnknownSession"


class ProtocolViolation(Exception):
    """Envelope-level breach; the connection is closed with this reason."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


# --- command handling -----------------------------------------------------------


def _need(args: dict[str, Any], key: str, kind: type) -> Any:
    if key not in args:
        raise InvalidParam(f"missing argument {key!r}")
    value = args[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise InvalidParam(f"argument {key!r} must be {kind.__name__}")
    return value


def _vec(value: Any, n: int, what: str) -> tuple[float, ...]:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != n
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise InvalidParam(f"{what} must be a list of {n} numbers")
    return tuple(float(v) for v in value)


def _coerce_keyframe(channel: str, value: Any) -> object:
    if channel in ("position.x", "position.y", "position.z"):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise InvalidParam(f"{channel} keyframe must be a number")
        return float(value)
    if channel in ("position", "scale"):
        return _vec(value, 3, f"{channel} keyframe")
    if channel == "rotation":
        q = _vec(value, 4, "rotation keyframe")
        if not q_is_unit(q):
            raise InvalidParam("rotation keyframe must be a unit quaternion")
        return q
    if channel == "state":
        if not isinstance(value, str):
            raise InvalidParam("state keyframe must be a string")
        return value
    if channel.startswith("joint."):
        return _vec(value, 3, "joint keyframe")
    raise InvalidParam(f"channel {channel!r} not writable over the wire")


def _input_sample(doc: Any) -> InputSample:
    if not isinstance(doc, dict):
        raise InvalidParam("each sample must be an object")
    t = doc.get("t")
    if not isinstance(t, (int, float)) or isinstance(t, bool):
        raise InvalidParam("sample t must be a number")
    position = _vec(doc["position"], 3, "sample position") if "position" in doc else None
    rotation = None
    if "rotation" in doc:
        rotation = _vec(doc["rotation"], 4, "sample rotation")
        if not q_is_unit(rotation):
            raise InvalidParam("sample rotation must be a unit quaternion")
    joints = None
    if "joints" in doc:
        raw = doc["joints"]
        if not isinstance(raw, dict):
            raise InvalidParam("sample joints must be an object")
        joints = {name: _vec(v, 3, f"joint {name}") for name, v in raw.items()}
    return InputSample(t=float(t), position=position, rotation=rotation, joints=joints)


class _CommandOutcome:
    def __init__(
        self,
        result: dict[str, Any],
        delta: dict[str, Any] | None = None,
        ack_kind: str = "ack",
    ):
        self.result = result
        self.delta = delta
        self.ack_kind = ack_kind


def _transport_view(session: Session) -> dict[str, Any]:
    return {"mode": session.player.mode, "cursor": session.player.cursor}


def apply_command(session: Session, op: str, args: dict[str, Any]) -> _CommandOutcome:
    """Run one command against the session (caller holds the write lock)."""
    project = session.project
    player = session.player

    if op == "create_track":
        name = args.get("name", "")
        if not isinstance(name, str):
            raise InvalidParam("name must be a string")
        position = args.get("position")
        if position is not None and not isinstance(position, int):
            raise InvalidParam("position must be an integer")
        track = project.create_track(name, position)
        return _CommandOutcome({"track_id": track.id}, {"op": op, "track_id": track.id})
    if op == "reorder_track":
        project.reorder_track(_need(args, "track_id", str), _need(args, "new_index", int))
        return _CommandOutcome({"ok": True}, {"op": op})
    if op == "set_track_flags":
        for flag in ("muted", "locked"):
            if flag in args and not isinstance(args[flag], bool):
                raise InvalidParam(f"{flag} must be a boolean")
        track = project.set_track_flags(
            _need(args, "track_id", str),
            muted=args.get("muted"),
            locked=args.get("locked"),
        )
        return _CommandOutcome(
            {"muted": track.muted, "locked": track.locked}, {"op": op, "track_id": track.id}
        )
    if op == "delete_track":
        project.delete_track(_need(args, "track_id", str))
        return _CommandOutcome({"ok": True}, {"op": op})
    if op == "create_slot":
        slot = project.create_slot(
            _need(args, "track_id", str), _need(args, "start", int), _need(args, "end", int)
        )
        return _CommandOutcome({"slot_id": slot.id}, {"op": op, "slot_id": slot.id})
    if op == "move_slot":
        slot = project.move_slot(
            _need(args, "slot_id", str),
            _need(args, "dest_track_id", str),
            _need(args, "new_start", int),
        )
        return _CommandOutcome(
            {"slot_id": slot.id, "start": slot.start, "end": slot.end},
            {"op": op, "slot_id": slot.id},
        )
    if op == "trim_slot":
        new_start = args.get("new_start")
        new_end = args.get("new_end")
        for label, v in (("new_start", new_start), ("new_end", new_end)):
            if v is not None and (not isinstance(v, int) or isinstance(v, bool)):
                raise InvalidParam(f"{label} must be an integer")
        slot = project.trim_slot(_need(args, "slot_id", str), new_start, new_end)
        return _CommandOutcome(
            {"slot_id": slot.id, "start": slot.start, "end": slot.end},
            {"op": op, "slot_id": slot.id},
        )
    if op == "delete_slot":
        project.delete_slot(_need(args, "slot_id", str))
        return _CommandOutcome({"ok": True}, {"op": op})
    if op == "attach_effect":
        params = args.get("params", {})
        if not isinstance(params, dict):
            raise InvalidParam("params must be an object")
        effect = project.attach_effect(
            _need(args, "slot_id", str),
            _need(args, "effect_type", str),
            _need(args, "target_id", str),
            params,
        )
        return _CommandOutcome({"effect_id": effect.id}, {"op": op, "effect_id": effect.id})
    if op == "detach_effect":
        project.detach_effect(_need(args, "effect_id", str))
        return _CommandOutcome({"ok": True}, {"op": op})
    if op == "set_effect_params":
        effect_id = _need(args, "effect_id", str)
        params = _need(args, "params", dict)
        effect = project.set_effect_params(effect_id, params)
        return _CommandOutcome(
            {"params": dict(effect.params)}, {"op": op, "effect_id": effect_id}
        )
    if op == "set_keyframe":
        effect_id = _need(args, "effect_id", str)
        channel = _need(args, "channel", str)
        frame = _need(args, "frame", int)
        track, slot, effect = project.timeline.find_effect(effect_id)
        if track.locked:
            raise LockedTrack(f"track {track.id!r} is locked")
        if not slot.start <= frame <= slot.end:
            raise FrameOutOfSlot(f"frame {frame} outside [{slot.start}, {slot.end}]")
        value = _coerce_keyframe(channel, args.get("value"))
        if channel == "position":
            for axis, component in zip(("x", "y", "z"), value):
                effect.channel(f"position.{axis}").set_sample(frame, component)
        else:
            effect.channel(channel).set_sample(frame, value)
        project.bump()
        return _CommandOutcome({"ok": True}, {"op": op, "effect_id": effect_id})
    if op == "remove_keyframe":
        effect_id = _need(args, "effect_id", str)
        channel = _need(args, "channel", str)
        frame = _need(args, "frame", int)
        track, slot, effect = project.timeline.find_effect(effect_id)
        if track.locked:
            raise LockedTrack(f"track {track.id!r} is locked")
        names = (
            ("position.x", "position.y", "position.z")
            if channel == "position"
            else (channel,)
        )
        removed = sum(effect.channel(n).remove_range(frame, frame) for n in names)
        project.bump()
        return _CommandOutcome({"removed": removed}, {"op": op, "effect_id": effect_id})

    if op == "transport":
        return _CommandOutcome(_transport_view(session))
    if op == "play":
        player.play()
        return _CommandOutcome(_transport_view(session))
    if op == "pause":
        player.pause()
        return _CommandOutcome(_transport_view(session))
    if op == "seek":
        cursor = player.seek(_need(args, "frame", int))
        return _CommandOutcome({"cursor": cursor, "mode": player.mode})
    if op == "step":
        frame = player.step()
        return _CommandOutcome({"frame": frame, "mode": player.mode, "cursor": player.cursor})

    if op == "record_begin":
        session.recorder = player.start_recording(
            _need(args, "slot_id", str), _need(args, "effect_id", str)
        )
        return _CommandOutcome(
            {
                "mode": player.mode,
                "slot_id": session.recorder.slot.id,
                "effect_id": session.recorder.effect.id,
            }
        )
    if op == "record_input":
        if session.recorder is None or player.mode != MODE_RECORDING:
            raise InvalidParam("no live recording")
        raw = args.get("samples")
        if not isinstance(raw, list):
            raise InvalidParam("samples must be a list")
        samples = [_input_sample(doc) for doc in raw]
        for sample in samples:
            session.recorder.ingest(sample)
        return _CommandOutcome(
            {"accepted": len(samples)}, ack_kind="recording-ingest-ack"
        )
    if op == "record_event":
        if session.recorder is None or player.mode != MODE_RECORDING:
            raise InvalidParam("no live recording")
        kind = _need(args, "event", str)
        t = _need(args, "t", float)
        if kind == "grab":
            event = GrabEvent(t, _need(args, "prop_id", str), args.get("hand", "right"))
        elif kind == "release":
            event = ReleaseEvent(t, args.get("hand", "right"))
        elif kind == "trigger":
            event = TriggerEvent(t, _need(args, "prop_id", str), _need(args, "state", str))
        else:
            raise InvalidParam(f"unknown event kind {kind!r}")
        session.recorder.push_event(event)
        return _CommandOutcome({"queued": kind})
    if op == "record_end":
        if session.recorder is None:
            raise InvalidParam("no live recording")
        summary = player.stop_recording()
        session.recorder = None
        return _CommandOutcome(
            {
                "frames_written": summary.frames_written,
                "last_frame": summary.last_frame,
                "created_effects": list(summary.created_effects),
                "mode": player.mode,
                "cursor": player.cursor,
            },
            {"op": op},
        )

    raise InvalidParam(f"unknown op {op!r}")


# --- the app --------------------------------------------------------------------


def _error_status(exc: EngineError) -> int:
    code = exc.code
    if code.startswith("Unknown"):
        return 404
    if code in ("MalformedFile", "UnsupportedVersion", "MalformedTelemetry"):
        return 422
    if code in ("OverlapRejected", "DuplicateEffectTarget", "DuplicateId"):
        return 409
    return 400


def _json(payload: dict[str, Any], status: int = 200) -> Response:
    return Response(
        json.dumps(payload, sort_keys=True) + "\n",
        status_code=status,
        media_type="application/json",
    )


def _session_doc(session: Session) -> dict[str, Any]:
    return {
        "id": session.id,
        "revision": session.project.revision,
        "frame_rate": session.project.frame_rate,
        "duration": session.project.duration,
        "clients": len(session.clients),
        "transport": _transport_view(session),
    }


async def _broadcast(session: Session, event: dict[str, Any]) -> None:
    text = json.dumps(event, sort_keys=True)
    dead = []
    for ws in list(session.clients):
        try:
            await ws.send_text(text)
        except Exception:
            dead.append(ws)
    for ws in dead:
        session.clients.discard(ws)


async def _run_ticker(session: Session) -> None:
    """Advance live playback one frame per tick, broadcasting transport-ticks."""
    period = 1.0 / session.project.frame_rate
    while True:
        await asyncio.sleep(period)
        async with session.lock:
            if session.player.mode != MODE_PLAYING:
                return
            frame = session.player.step()
            stopped = session.player.mode != MODE_PLAYING
            await _broadcast(
                session,
                {
                    "seq": session.applied,
                    "kind": "transport-tick",
                    "payload": {
                        "frame": frame,
                        "mode": session.player.mode,
                        "cursor": session.player.cursor,
                    },
                },
            )
        if stopped:
            return


async def _run_record_ticker(session: Session) -> None:
    """Report the live recording head at frame rate while recording runs."""
    fps = session.project.frame_rate
    period = 1.0 / fps
    loop = asyncio.get_event_loop()
    t0 = loop.time()
    while True:
        await asyncio.sleep(period)
        async with session.lock:
            if session.player.mode != MODE_RECORDING or session.recorder is None:
                return
            slot = session.recorder.slot
            frame = min(slot.end, slot.start + int((loop.time() - t0) * fps))
            await _broadcast(
                session,
                {
                    "seq": session.applied,
                    "kind": "transport-tick",
                    "payload": {"frame": frame, "mode": MODE_RECORDING, "cursor": frame},
                },
            )


def _parse_envelope(raw: str, session_id: str) -> tuple[int, str, dict[str, Any]]:
    try:
        doc = json.loads(raw)
    except ValueError:
        raise ProtocolViolation("NotJson") from None
    if not isinstance(doc, dict):
        raise ProtocolViolation("BadEnvelope")
    seq = doc.get("seq")
    op = doc.get("op")
    args = doc.get("args", {})
    if not isinstance(seq, int) or isinstance(seq, bool) or not isinstance(op, str):
        raise ProtocolViolation("BadEnvelope")
    if not isinstance(args, dict):
        raise ProtocolViolation("BadEnvelope")
    if doc.get("session") != session_id:
        raise ProtocolViolation("SessionMismatch")
    return seq, op, args


def create_app(registry: SessionRegistry | None = None) -> FastAPI:
    app = FastAPI(title="reenact session service", version=__version__)
    reg = registry if registry is not None else SessionRegistry()
    app.state.registry = reg

    @app.exception_handler(EngineError)
    async def _engine_error(request: Request, exc: EngineError):
        return _json({"error": exc.code, "message": str(exc)}, _error_status(exc))

    @app.get("/health")
    async def health():
        return _json({"ok": True, "version": __version__})

    @app.get("/projects")
    async def list_projects():
        return _json({"projects": [_session_doc(s) for s in reg.sessions.values()]})

    @app.post("/projects")
    async def create_project(request: Request):
        body = await request.body()
        source = request.query_params.get("source", "file")
        if not body:
            project = Project()
        elif source == "file":
            project = load_project(body)
        elif source == "script":
            project = parse_scenario(body.decode("utf-8"))
        else:
            raise MalformedFile(f"unknown source {source!r}")
        session = reg.create(project)
        return _json(_session_doc(session), status=201)

    @app.get("/projects/{session_id}")
    async def get_project(session_id: str):
        return _json(_session_doc(reg.get(session_id)))

    @app.delete("/projects/{session_id}")
    async def delete_project(session_id: str):
        session = reg.get(session_id)
        for ws in list(session.clients):
            try:
                await ws.close(code=1001)
            except Exception:
                pass
        reg.sessions.pop(session_id, None)
        return _json({"ok": True})

    @app.get("/projects/{session_id}/file")
    async def get_file(session_id: str):
        session = reg.get(session_id)
        return Response(save_project(session.project), media_type="application/json")

    @app.put("/projects/{session_id}/file")
    async def put_file(session_id: str, request: Request):
        session = reg.get(session_id)
        body = await request.body()
        project = load_project(body)
        async with session.lock:
            session.project = project
            session.player = Player(project)
            session.recorder = None
            session.applied += 1
            await _broadcast(
                session,
                {
                    "seq": session.applied,
                    "kind": "state-delta",
                    "payload": {"op": "load_file", "timeline": timeline_document(project)},
                },
            )
        return _json(_session_doc(session))

    @app.get("/projects/{session_id}/validate")
    async def validate(session_id: str):
        session = reg.get(session_id)
        violations = session.project.validate()
        return _json({"valid": not violations, "violations": violations})

    @app.get("/projects/{session_id}/timeline")
    async def get_timeline(session_id: str):
        return _json(timeline_document(reg.get(session_id).project))

    @app.get("/projects/{session_id}/scene")
    async def get_scene(session_id: str):
        return _json(scene_document(reg.get(session_id).project))

    @app.get("/projects/{session_id}/state")
    async def get_state(session_id: str, frame: int = 0):
        session = reg.get(session_id)
        if not 0 <= frame <= session.project.duration:
            raise InvalidRange(
                f"frame {frame} outside [0, {session.project.duration}]"
            )
        return _json(state_document(state_at(session.project, frame)))

    @app.get("/projects/{session_id}/trace")
    async def get_trace(
        session_id: str,
        start: int = 0,
        end: int | None = None,
        stride: int = 1,
        fmt: str = FORMAT_ROWS,
    ):
        session = reg.get(session_id)
        project = session.project
        stop = project.duration if end is None else end
        if stride < 1 or start < 0 or stop < start or stop > project.duration:
            raise InvalidRange(f"bad trace range [{start}, {stop}] stride {stride}")
        if fmt not in (FORMAT_ROWS, FORMAT_STRUCTURED):
            raise MalformedFile(f"unknown trace format {fmt!r}")
        states = export_trace(project, start, stop)[::stride]
        return Response(write_trace(states, format=fmt), media_type="text/plain")

    @app.websocket("/ws/{session_id}")
    async def command_channel(ws: WebSocket, session_id: str):
        session = reg.sessions.get(session_id)
        if session is None:
            await ws.close(code=CLOSE_UNKNOWN_SESSION, reason="UnknownSession")
            return
        await ws.accept()
        session.clients.add(ws)
        last_seq: int | None = None
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    seq, op, args = _parse_envelope(raw, session_id)
                    if last_seq is not None and seq <= last_seq:
                        raise ProtocolViolation("SeqNotIncreasing")
                    last_seq = seq
                except ProtocolViolation as violation:
                    await ws.close(code=CLOSE_PROTOCOL, reason=violation.reason)
                    return
                async with session.lock:
                    try:
                        outcome = apply_command(session, op, args)
                    except EngineError as exc:
                        await ws.send_text(
                            json.dumps(
                                {
                                    "seq": seq,
                                    "kind": "error",
                                    "payload": {"code": exc.code, "message": str(exc)},
                                },
                                sort_keys=True,
                            )
                        )
                        continue
                    await ws.send_text(
                        json.dumps(
                            {
                                "seq": seq,
                                "kind": outcome.ack_kind,
                                "payload": outcome.result,
                            },
                            sort_keys=True,
                        )
                    )
                    if outcome.delta is not None:
                        session.applied += 1
                        await _broadcast(
                            session,
                            {
                                "seq": session.applied,
                                "kind": "state-delta",
                                "payload": {
                                    **outcome.delta,
                                    "timeline": timeline_document(session.project),
                                },
                            },
                        )
                    if op in ("play", "pause", "seek", "record_begin", "record_end"):
                        await _broadcast(
                            session,
                            {
                                "seq": session.applied,
                                "kind": "transport-tick",
                                "payload": {
                                    "frame": session.player.cursor,
                                    **_transport_view(session),
                                },
                            },
                        )
                    if op == "play" and session.player.mode == MODE_PLAYING:
                        if session.ticker is None or session.ticker.done():
                            session.ticker = asyncio.ensure_future(_run_ticker(session))
                    if op == "record_begin":
                        session.ticker = asyncio.ensure_future(_run_record_ticker(session))
        except WebSocketDisconnect:
            pass
        finally:
            session.clients.discard(ws)

    return app


# --- standalone serving -----------------------------------------------------------


def serve(
    port: int = DEFAULT_PORT,
    host: str = "127.0.0.1",
    project_path: str | None = None,
) -> None:
    """Run the service until interrupted; raises PortInUse if the bind fails."""
    import uvicorn

    registry = SessionRegistry()
    if project_path is not None:
        with open(project_path, "rb") as fh:
            body = fh.read()
        if project_path.endswith(".crimescn"):
            registry.create(parse_scenario(body.decode("utf-8")))
        else:
            registry.create(load_project(body))
    app = create_app(registry)
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((host, port))
    except OSError as exc:
        sock.close()
        raise PortInUse(f"cannot bind {host}:{port}: {exc}") from None
    sock.listen(128)
    config = uvicorn.Config(app, log_level="warning", lifespan="on")
    server = uvicorn.Server(config)
    server.run(sockets=[sock])
