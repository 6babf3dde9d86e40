"""Project container format, trace writers, and the telemetry reader.

A project file is one UTF-8 JSON manifest; each channel's sample data is
packed into a little-endian binary blob carried inline as base64. The
manifest is canonical: object keys sorted, no insignificant whitespace,
scene objects sorted by id, slots by start frame, channels by name, and a
single trailing newline. Orders that carry meaning (track priority, effect
stacking within a slot, wall authoring order) are preserved as-is.

Canonical form makes byte equality a usable oracle: identical projects
save to identical bytes, and save -> load -> save is the identity.

Blob layout (all little-endian):

    u8 kind, u8 encoding, u32 count, then per sample: u32 frame + payload
    scalar  f64
    vec3    3 x f64
    quat    4 x f64 (w, x, y, z)
    state   u16 byte length + UTF-8 text
    attach  u8 flag; when 1: u16-len parent id, u16-len anchor name,
            10 x f64 (position 3, rotation wxyz 4, scale 3)
"""

from __future__ import annotations

import base64
import binascii
import csv
import io
import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

from .effects import (
    EFFECT_TYPES,
    ENC_ABSOLUTE,
    ENC_DELTA,
    KIND_ATTACH,
    KIND_QUAT,
    KIND_SCALAR,
    KIND_STATE,
    KIND_VEC3,
    CapturedState,
    Channel,
    EffectInstance,
    channel_kind,
    validate_params,
)
from .errors import (
    EngineError,
    MalformedFile,
    MalformedTelemetry,
    UnsupportedVersion,
    ValidationFailed,
)
from .mathx import Transform
from .project import Project
from .scene import ControllableObject, ObjectClass, Scene, SceneState
from .timeline import Slot, Timeline, Track

FORMAT_NAME = "crimeproj"
FORMAT_VERSION = 1

_KIND_CODES = {
    KIND_SCALAR: 1,
    KIND_VEC3: 2,
    KIND_QUAT: 3,
    KIND_STATE: 4,
    KIND_ATTACH: 5,
}
_CODE_KINDS = {v: k for k, v in _KIND_CODES.items()}
_ENC_CODES = {ENC_ABSOLUTE: 0, ENC_DELTA: 1}
_CODE_ENCS = {v: k for k, v in _ENC_CODES.items()}

_U8 = struct.Struct("<B")
_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")
_F64 = struct.Struct("<d")


# --- channel blobs --------------------------------------------------------


def pack_channel(channel: Channel) -> bytes:
    out = bytearray()
    out += _U8.pack(_KIND_CODES[channel.kind])
    out += _U8.pack(_ENC_CODES[channel.encoding])
    out += _U32.pack(len(channel.samples))
    for frame, value in channel.samples:
        out += _U32.pack(frame)
        out += _pack_value(channel.kind, value)
    return bytes(out)


def _pack_value(kind: str, value: object) -> bytes:
    if kind == KIND_SCALAR:
        return _F64.pack(float(value))  # type: ignore[arg-type]
    if kind == KIND_VEC3:
        return struct.pack("<3d", *value)  # type: ignore[misc]
    if kind == KIND_QUAT:
        return struct.pack("<4d", *value)  # type: ignore[misc]
    if kind == KIND_STATE:
        raw = str(value).encode("utf-8")
        return _U16.pack(len(raw)) + raw
    if value is None:
        return _U8.pack(0)
    parent, anchor, local = value  # type: ignore[misc]
    p = parent.encode("utf-8")
    a = anchor.encode("utf-8")
    return (
        _U8.pack(1)
        + _U16.pack(len(p))
        + p
        + _U16.pack(len(a))
        + a
        + struct.pack(
            "<10d", *local.position, *local.rotation, *local.scale
        )
    )


class _BlobReader:
    """Cursor over one decoded blob; failures carry the blob byte offset."""

    def __init__(self, data: bytes, label: str):
        self.data = data
        self.pos = 0
        self.label = label

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise MalformedFile(
                f"channel blob {self.label}: truncated at byte {self.pos}",
                offset=self.pos,
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return _U8.unpack(self.take(1))[0]

    def u16(self) -> int:
        return _U16.unpack(self.take(2))[0]

    def u32(self) -> int:
        return _U32.unpack(self.take(4))[0]

    def f64(self) -> float:
        return _F64.unpack(self.take(8))[0]

    def text(self) -> str:
        n = self.u16()
        raw = self.take(n)
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError:
            raise MalformedFile(
                f"channel blob {self.label}: bad UTF-8 at byte {self.pos - n}",
                offset=self.pos - n,
            ) from None


def unpack_channel(name: str, encoding: str, blob: bytes) -> Channel:
    reader = _BlobReader(blob, name)
    kind_code = reader.u8()
    enc_code = reader.u8()
    kind = _CODE_KINDS.get(kind_code)
    if kind is None or kind != channel_kind(name):
        raise MalformedFile(f"channel blob {name}: kind code {kind_code}", offset=0)
    if _CODE_ENCS.get(enc_code) != encoding:
        raise MalformedFile(
            f"channel blob {name}: encoding code {enc_code} "
            f"does not match manifest encoding {encoding!r}",
            offset=1,
        )
    count = reader.u32()
    samples: list[tuple[int, object]] = []
    for _ in range(count):
        frame = reader.u32()
        samples.append((frame, _unpack_value(kind, reader)))
    if reader.pos != len(blob):
        raise MalformedFile(
            f"channel blob {name}: {len(blob) - reader.pos} trailing bytes",
            offset=reader.pos,
        )
    return Channel(name, encoding=encoding, samples=samples)


def _unpack_value(kind: str, r: _BlobReader) -> object:
    if kind == KIND_SCALAR:
        return r.f64()
    if kind == KIND_VEC3:
        return (r.f64(), r.f64(), r.f64())
    if kind == KIND_QUAT:
        return (r.f64(), r.f64(), r.f64(), r.f64())
    if kind == KIND_STATE:
        return r.text()
    if r.u8() == 0:
        return None
    parent = r.text()
    anchor = r.text()
    nums = [r.f64() for _ in range(10)]
    local = Transform(
        position=(nums[0], nums[1], nums[2]),
        rotation=(nums[3], nums[4], nums[5], nums[6]),
        scale=(nums[7], nums[8], nums[9]),
    )
    return (parent, anchor, local)


# --- manifest build -------------------------------------------------------


def _transform_doc(t: Transform) -> dict[str, Any]:
    return {
        "position": list(t.position),
        "rotation": list(t.rotation),
        "scale": list(t.scale),
    }


def _transform_from(doc: Any, where: str) -> Transform:
    d = _expect_dict(doc, where)
    return Transform(
        position=_expect_floats(d.get("position"), 3, f"{where}.position"),
        rotation=_expect_floats(d.get("rotation"), 4, f"{where}.rotation"),
        scale=_expect_floats(d.get("scale"), 3, f"{where}.scale"),
    )


def _object_doc(obj: ControllableObject) -> dict[str, Any]:
    return {
        "id": obj.id,
        "name": obj.name,
        "class": obj.cls.value,
        "initial": _transform_doc(obj.initial),
        "triggerable": obj.triggerable,
        "states": list(obj.states),
        "initial_state": obj.initial_state,
        "payload": obj.payload,
        "attachment": list(obj.attachment) if obj.attachment else None,
    }


def _captured_doc(cap: CapturedState) -> dict[str, Any]:
    return {
        "transform": _transform_doc(cap.transform),
        "state": cap.state,
        "pose": [list(p) for p in cap.pose] if cap.pose is not None else None,
        "attached_to": list(cap.attached_to) if cap.attached_to else None,
    }


def _effect_doc(effect: EffectInstance) -> dict[str, Any]:
    channels = []
    for name in sorted(effect.channels):
        ch = effect.channels[name]
        channels.append(
            {
                "name": name,
                "encoding": ch.encoding,
                "data": base64.b64encode(pack_channel(ch)).decode("ascii"),
            }
        )
    return {
        "id": effect.id,
        "type": effect.type,
        "target": effect.target_id,
        "params": dict(sorted(effect.params.items())),
        "captured": _captured_doc(effect.captured_initial),
        "channels": channels,
    }


def project_document(project: Project) -> dict[str, Any]:
    """The manifest as a plain dict (canonical orders applied)."""
    plan = project.scene.floor_plan
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "frame_rate": project.frame_rate,
        "duration": project.duration,
        "scene": {
            "objects": [
                _object_doc(project.scene.objects[oid])
                for oid in sorted(project.scene.objects)
            ],
            "floor_plan": {
                "walls": [[list(w.a), list(w.b)] for w in plan.walls],
                "regions": [
                    {"name": r.name, "polygon": [list(v) for v in r.polygon]}
                    for r in plan.regions
                ],
                "spawns": [
                    {"name": name, "point": list(plan.spawns[name])}
                    for name in sorted(plan.spawns)
                ],
            },
        },
        "timeline": {
            "tracks": [
                {
                    "id": tr.id,
                    "name": tr.name,
                    "muted": tr.muted,
                    "locked": tr.locked,
                    "slots": [
                        {
                            "id": sl.id,
                            "start": sl.start,
                            "end": sl.end,
                            "effects": [_effect_doc(e) for e in sl.effects],
                        }
                        for sl in sorted(tr.slots, key=lambda s: s.start)
                    ],
                }
                for tr in project.timeline.tracks
            ]
        },
    }


def save_project(project: Project, destination: Any = None) -> bytes:
    """Serialize to canonical bytes; refuses projects that do not validate."""
    violations = project.validate()
    if violations:
        raise ValidationFailed(violations)
    text = json.dumps(
        project_document(project), sort_keys=True, separators=(",", ":")
    )
    data = (text + "\n").encode("utf-8")
    _write_bytes(destination, data)
    return data


# --- manifest read --------------------------------------------------------


def _expect_dict(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        raise MalformedFile(f"{where}: expected an object")
    return value


def _expect_list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise MalformedFile(f"{where}: expected an array")
    return value


def _expect_str(value: Any, where: str) -> str:
    if not isinstance(value, str):
        raise MalformedFile(f"{where}: expected a string")
    return value


def _expect_int(value: Any, where: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise MalformedFile(f"{where}: expected an integer")
    return value


def _expect_bool(value: Any, where: str) -> bool:
    if not isinstance(value, bool):
        raise MalformedFile(f"{where}: expected a boolean")
    return value


def _expect_floats(value: Any, n: int, where: str) -> tuple[float, ...]:
    items = _expect_list(value, where)
    if len(items) != n:
        raise MalformedFile(f"{where}: expected {n} numbers")
    out = []
    for x in items:
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise MalformedFile(f"{where}: expected {n} numbers")
        out.append(float(x))
    return tuple(out)


def _opt(value: Any, reader, where: str):
    return None if value is None else reader(value, where)


def _object_from(doc: Any, where: str) -> ControllableObject:
    d = _expect_dict(doc, where)
    cls_name = _expect_str(d.get("class"), f"{where}.class")
    try:
        cls = ObjectClass(cls_name)
    except ValueError:
        raise MalformedFile(f"{where}.class: unknown class {cls_name!r}") from None
    states = [
        _expect_str(s, f"{where}.states[{i}]")
        for i, s in enumerate(_expect_list(d.get("states"), f"{where}.states"))
    ]
    attachment = d.get("attachment")
    if attachment is not None:
        pair = _expect_list(attachment, f"{where}.attachment")
        if len(pair) != 2:
            raise MalformedFile(f"{where}.attachment: expected [parent, anchor]")
        attachment = (
            _expect_str(pair[0], f"{where}.attachment[0]"),
            _expect_str(pair[1], f"{where}.attachment[1]"),
        )
    return ControllableObject(
        id=_expect_str(d.get("id"), f"{where}.id"),
        name=_expect_str(d.get("name"), f"{where}.name"),
        cls=cls,
        initial=_transform_from(d.get("initial"), f"{where}.initial"),
        triggerable=_expect_bool(d.get("triggerable"), f"{where}.triggerable"),
        states=tuple(states),
        initial_state=_opt(d.get("initial_state"), _expect_str, f"{where}.initial_state"),
        payload=_opt(d.get("payload"), _expect_str, f"{where}.payload"),
        attachment=attachment,
    )


def _captured_from(doc: Any, where: str) -> CapturedState:
    d = _expect_dict(doc, where)
    pose = d.get("pose")
    if pose is not None:
        rows = _expect_list(pose, f"{where}.pose")
        pose = tuple(
            _expect_floats(row, 3, f"{where}.pose[{i}]") for i, row in enumerate(rows)
        )
    attached = d.get("attached_to")
    if attached is not None:
        pair = _expect_list(attached, f"{where}.attached_to")
        if len(pair) != 2:
            raise MalformedFile(f"{where}.attached_to: expected [parent, anchor]")
        attached = (
            _expect_str(pair[0], f"{where}.attached_to[0]"),
            _expect_str(pair[1], f"{where}.attached_to[1]"),
        )
    return CapturedState(
        transform=_transform_from(d.get("transform"), f"{where}.transform"),
        state=_opt(d.get("state"), _expect_str, f"{where}.state"),
        pose=pose,
        attached_to=attached,
    )


def _effect_from(doc: Any, where: str) -> EffectInstance:
    d = _expect_dict(doc, where)
    etype = _expect_str(d.get("type"), f"{where}.type")
    if etype not in EFFECT_TYPES:
        raise ValidationFailed([f"UnknownEffect: {where}: effect type {etype!r}"])
    params = _expect_dict(d.get("params"), f"{where}.params")
    try:
        params = validate_params(etype, params)  # strict: unknown keys rejected
    except EngineError as exc:
        raise ValidationFailed([f"{exc.code}: {where}: {exc}"]) from None
    effect = EffectInstance(
        id=_expect_str(d.get("id"), f"{where}.id"),
        type=etype,
        target_id=_expect_str(d.get("target"), f"{where}.target"),
        params=params,
        captured_initial=_captured_from(d.get("captured"), f"{where}.captured"),
    )
    writable = EFFECT_TYPES[etype].writable
    for i, chdoc in enumerate(_expect_list(d.get("channels"), f"{where}.channels")):
        c = _expect_dict(chdoc, f"{where}.channels[{i}]")
        name = _expect_str(c.get("name"), f"{where}.channels[{i}].name")
        if name not in writable:
            raise ValidationFailed(
                [f"InvalidParam: {where}: {etype} cannot write channel {name!r}"]
            )
        encoding = _expect_str(c.get("encoding"), f"{where}.channels[{i}].encoding")
        if encoding not in (ENC_ABSOLUTE, ENC_DELTA):
            raise MalformedFile(
                f"{where}.channels[{i}].encoding: unknown encoding {encoding!r}"
            )
        raw = _expect_str(c.get("data"), f"{where}.channels[{i}].data")
        try:
            blob = base64.b64decode(raw, validate=True)
        except (binascii.Error, ValueError):
            raise MalformedFile(
                f"{where}.channels[{i}].data: invalid base64"
            ) from None
        try:
            effect.channels[name] = unpack_channel(name, encoding, blob)
        except EngineError as exc:
            if isinstance(exc, MalformedFile):
                raise
            raise ValidationFailed([f"{exc.code}: {where}: {exc}"]) from None
    return effect


def load_project(source: Any) -> Project:
    """Parse, rebuild, and fully validate a project file."""
    data = _read_bytes(source)
    try:
        doc = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise MalformedFile(f"not UTF-8: {exc}", offset=exc.start) from None
    except json.JSONDecodeError as exc:
        raise MalformedFile(str(exc), offset=exc.pos) from None
    d = _expect_dict(doc, "document")
    if d.get("format") != FORMAT_NAME:
        raise MalformedFile(f"document.format: expected {FORMAT_NAME!r}")
    if d.get("version") != FORMAT_VERSION:
        raise UnsupportedVersion(d.get("version"))

    project = Project(
        scene=Scene(),
        timeline=Timeline(),
        frame_rate=_expect_int(d.get("frame_rate"), "document.frame_rate"),
    )
    if project.frame_rate <= 0:
        raise MalformedFile("document.frame_rate: must be positive")

    scene_doc = _expect_dict(d.get("scene"), "document.scene")
    for i, objdoc in enumerate(_expect_list(scene_doc.get("objects"), "scene.objects")):
        obj = _object_from(objdoc, f"scene.objects[{i}]")
        try:
            project.scene.register_object(obj)
        except EngineError as exc:
            raise ValidationFailed([f"{exc.code}: scene.objects[{i}]: {exc}"]) from None

    plan_doc = _expect_dict(scene_doc.get("floor_plan"), "scene.floor_plan")
    plan = project.scene.floor_plan
    for i, wdoc in enumerate(_expect_list(plan_doc.get("walls"), "floor_plan.walls")):
        pair = _expect_list(wdoc, f"floor_plan.walls[{i}]")
        if len(pair) != 2:
            raise MalformedFile(f"floor_plan.walls[{i}]: expected two endpoints")
        try:
            plan.add_wall(
                _expect_floats(pair[0], 2, f"floor_plan.walls[{i}][0]"),
                _expect_floats(pair[1], 2, f"floor_plan.walls[{i}][1]"),
            )
        except EngineError as exc:
            raise ValidationFailed([f"{exc.code}: floor_plan.walls[{i}]: {exc}"]) from None
    for i, rdoc in enumerate(_expect_list(plan_doc.get("regions"), "floor_plan.regions")):
        r = _expect_dict(rdoc, f"floor_plan.regions[{i}]")
        verts = [
            _expect_floats(v, 2, f"floor_plan.regions[{i}].polygon[{j}]")
            for j, v in enumerate(
                _expect_list(r.get("polygon"), f"floor_plan.regions[{i}].polygon")
            )
        ]
        try:
            plan.add_region(_expect_str(r.get("name"), f"floor_plan.regions[{i}].name"), verts)
        except EngineError as exc:
            raise ValidationFailed(
                [f"{exc.code}: floor_plan.regions[{i}]: {exc}"]
            ) from None
    for i, sdoc in enumerate(_expect_list(plan_doc.get("spawns"), "floor_plan.spawns")):
        s = _expect_dict(sdoc, f"floor_plan.spawns[{i}]")
        plan.add_spawn(
            _expect_str(s.get("name"), f"floor_plan.spawns[{i}].name"),
            _expect_floats(s.get("point"), 2, f"floor_plan.spawns[{i}].point"),
        )

    tl_doc = _expect_dict(d.get("timeline"), "document.timeline")
    for i, trdoc in enumerate(_expect_list(tl_doc.get("tracks"), "timeline.tracks")):
        tr = _expect_dict(trdoc, f"timeline.tracks[{i}]")
        where = f"timeline.tracks[{i}]"
        track = Track(
            id=_expect_str(tr.get("id"), f"{where}.id"),
            name=_expect_str(tr.get("name"), f"{where}.name"),
            muted=_expect_bool(tr.get("muted"), f"{where}.muted"),
            locked=_expect_bool(tr.get("locked"), f"{where}.locked"),
        )
        for j, sldoc in enumerate(_expect_list(tr.get("slots"), f"{where}.slots")):
            sl = _expect_dict(sldoc, f"{where}.slots[{j}]")
            sw = f"{where}.slots[{j}]"
            slot = Slot(
                id=_expect_str(sl.get("id"), f"{sw}.id"),
                start=_expect_int(sl.get("start"), f"{sw}.start"),
                end=_expect_int(sl.get("end"), f"{sw}.end"),
            )
            for k, edoc in enumerate(_expect_list(sl.get("effects"), f"{sw}.effects")):
                slot.effects.append(_effect_from(edoc, f"{sw}.effects[{k}]"))
            track.slots.append(slot)
        project.timeline.tracks.append(track)
    project.timeline.restore_id_counter()

    stated = _expect_int(d.get("duration"), "document.duration")
    if stated != project.duration:
        raise ValidationFailed(
            [
                "InvalidInterval: header duration "
                f"{stated} does not match timeline duration {project.duration}"
            ]
        )
    violations = project.validate()
    if violations:
        raise ValidationFailed(violations)
    return project


# --- byte stream plumbing -------------------------------------------------


def _write_bytes(destination: Any, data: bytes) -> None:
    if destination is None:
        return
    if isinstance(destination, (str, Path)):
        Path(destination).write_bytes(data)
    else:
        destination.write(data)


def _read_bytes(source: Any) -> bytes:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source)
    if isinstance(source, (str, Path)):
        return Path(source).read_bytes()
    data = source.read()
    if isinstance(data, str):
        return data.encode("utf-8")
    return bytes(data)


# --- traces ---------------------------------------------------------------

TRACE_COLUMNS = (
    "frame",
    "object",
    "pos_x",
    "pos_y",
    "pos_z",
    "rot_w",
    "rot_x",
    "rot_y",
    "rot_z",
    "state",
    "decorations",
)

FORMAT_ROWS = "rows"
FORMAT_STRUCTURED = "structured"


def _g(x: float) -> str:
    """Nine significant digits, shortest form ('1' for 1.0)."""
    return format(float(x), ".9g")


def write_trace(
    states: Iterable[SceneState], destination: Any = None, format: str = FORMAT_ROWS
) -> bytes:
    states = list(states)
    if format == FORMAT_ROWS:
        text = _trace_rows(states)
    elif format == FORMAT_STRUCTURED:
        text = _trace_structured(states)
    else:
        raise MalformedFile(f"unknown trace format {format!r}")
    data = text.encode("utf-8")
    _write_bytes(destination, data)
    return data


def _trace_rows(states: list[SceneState]) -> str:
    lines = [",".join(TRACE_COLUMNS)]
    for st in states:
        for oid in sorted(st.objects):
            snap = st.objects[oid]
            px, py, pz = snap.transform.position
            rw, rx, ry, rz = snap.transform.rotation
            kinds = sorted({dec.kind for dec in snap.decorations})
            lines.append(
                ",".join(
                    (
                        str(st.frame),
                        oid,
                        _g(px),
                        _g(py),
                        _g(pz),
                        _g(rw),
                        _g(rx),
                        _g(ry),
                        _g(rz),
                        snap.state if snap.state is not None else "-",
                        "+".join(kinds) if kinds else "-",
                    )
                )
            )
    return "\n".join(lines) + "\n"


def _trace_structured(states: list[SceneState]) -> str:
    frames = []
    for st in states:
        objects = {}
        for oid in sorted(st.objects):
            snap = st.objects[oid]
            objects[oid] = {
                "position": list(snap.transform.position),
                "rotation": list(snap.transform.rotation),
                "state": snap.state,
                "decorations": [dec.as_dict() for dec in snap.decorations],
            }
        frames.append({"frame": st.frame, "objects": objects})
    return _jdump({"frames": frames}) + "\n"


def _jdump(value: Any) -> str:
    """Deterministic JSON with floats at nine significant digits."""
    if isinstance(value, dict):
        parts = (f"{json.dumps(str(k))}:{_jdump(v)}" for k, v in value.items())
        return "{" + ",".join(parts) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_jdump(v) for v in value) + "]"
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return json.dumps(value)
    return _g(value)


# --- telemetry ------------------------------------------------------------

TELEMETRY_COLUMNS = ("participant", "task", "t", "x", "y", "z", "yaw")


@dataclass(frozen=True)
class TelemetrySample:
    """One logged headset sample. Ground plane is (x, y); z is height."""

    t: float
    position: tuple[float, float, float]
    yaw: float  # heading degrees in [0, 360)
    pitch: float = 0.0


@dataclass(frozen=True)
class TelemetryStream:
    participant: str
    task: str
    samples: tuple[TelemetrySample, ...]


def read_telemetry(source: Any) -> list[TelemetryStream]:
    """Parse a telemetry CSV into per-(participant, task) streams.

    Header is `participant,task,t,x,y,z,yaw` with an optional trailing
    `pitch` column. Time must be non-decreasing within each stream. Yaw is
    normalized into [0, 360). Blank lines are skipped; an empty file is an
    empty list.
    """
    text = _read_bytes(source).decode("utf-8", errors="replace")
    reader = csv.reader(io.StringIO(text))
    rows = [(reader.line_num, row) for row in reader if any(cell.strip() for cell in row)]
    if not rows:
        return []
    header_line, header = rows[0]
    header = [h.strip() for h in header]
    has_pitch = header == list(TELEMETRY_COLUMNS) + ["pitch"]
    if not has_pitch and header != list(TELEMETRY_COLUMNS):
        raise MalformedTelemetry(
            f"bad header {','.join(header)!r}", line=header_line
        )
    width = len(header)
    order: list[tuple[str, str]] = []
    buckets: dict[tuple[str, str], list[TelemetrySample]] = {}
    for line_num, row in rows[1:]:
        if len(row) != width:
            raise MalformedTelemetry(
                f"expected {width} columns, got {len(row)}", line=line_num
            )
        participant, task = row[0].strip(), row[1].strip()
        if not participant or not task:
            raise MalformedTelemetry("empty participant or task id", line=line_num)
        try:
            nums = [float(cell) for cell in row[2:]]
        except ValueError:
            raise MalformedTelemetry("non-numeric field", line=line_num) from None
        t, x, y, z, yaw = nums[:5]
        pitch = nums[5] if has_pitch else 0.0
        key = (participant, task)
        if key not in buckets:
            order.append(key)
            buckets[key] = []
        elif t < buckets[key][-1].t:
            raise MalformedTelemetry(
                f"time goes backwards ({t} after {buckets[key][-1].t})", line=line_num
            )
        buckets[key].append(
            TelemetrySample(t=t, position=(x, y, z), yaw=yaw % 360.0, pitch=pitch)
        )
    return [
        TelemetryStream(participant=p, task=k, samples=tuple(buckets[(p, k)]))
        for p, k in order
    ]
