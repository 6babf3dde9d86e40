"""Effect types, channel encodings and per-frame evaluation runtimes.

An effect owns a set of named channels. Two encodings exist:

* ``absolute``: keyframes; scalar and vector channels interpolate linearly
  between samples, rotations slerp, discrete channels step. Before the first
  sample a channel proposes nothing; after the last it holds.
* ``delta``: per-frame changes accumulated on top of an implicit base equal
  to the effect's captured initial state, anchored at the first sample.
  Nothing is proposed before the first sample, mirroring absolute channels
  so re-encoding a channel never changes the resolved result.

Evaluation is cursor-based: a runtime walks frames in increasing order and
its cursors advance monotonically, which keeps a full-timeline scan linear.
Cursor state can be snapshotted and restored bit-exactly for checkpointing.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import (
    FrameOutOfSlot,
    IncompatibleTarget,
    InvalidParam,
    InvalidState,
    NotStarted,
    UnknownEffect,
)
from .mathx import (
    Transform,
    Vec3,
    q_conj,
    q_mul,
    q_normalize,
    q_slerp,
    v_add,
    v_lerp,
    v_sub,
)
from .scene import (
    JOINT_NAMES,
    ControllableObject,
    ObjectClass,
    ObjectSnapshot,
    initial_snapshot,
)

GRAVITY = 9.81  # m/s^2, straight down (-y)

# --- channels -------------------------------------------------------------

KIND_SCALAR = "scalar"
KIND_VEC3 = "vec3"
KIND_QUAT = "quat"
KIND_STATE = "state"
KIND_ATTACH = "attach"

ENC_ABSOLUTE = "absolute"
ENC_DELTA = "delta"

POSITION_CHANNELS = ("position.x", "position.y", "position.z")
JOINT_CHANNELS = tuple(f"joint.{name}" for name in JOINT_NAMES)

# Application order within one effect's writes; later writes win, so physics
# overrides are appended after the keyframed position channels.
CHANNEL_ORDER: tuple[str, ...] = (
    ("attachment",) + POSITION_CHANNELS + ("rotation", "scale") + JOINT_CHANNELS + ("state",)
)
_CHANNEL_RANK = {name: i for i, name in enumerate(CHANNEL_ORDER)}


def channel_kind(name: str) -> str:
    if name in POSITION_CHANNELS:
        return KIND_SCALAR
    if name == "rotation":
        return KIND_QUAT
    if name == "scale":
        return KIND_VEC3
    if name.startswith("joint."):
        if name not in _CHANNEL_RANK:
            raise InvalidParam(f"unknown joint channel {name!r}")
        return KIND_VEC3
    if name == "state":
        return KIND_STATE
    if name == "attachment":
        return KIND_ATTACH
    raise InvalidParam(f"unknown channel {name!r}")


# Attachment channel values: None (detached) or (parent id, anchor, local Transform).
AttachValue = tuple[str, str, Transform] | None


@dataclass
class Channel:
    name: str
    encoding: str = ENC_ABSOLUTE
    samples: list[tuple[int, object]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.kind = channel_kind(self.name)
        if self.encoding not in (ENC_ABSOLUTE, ENC_DELTA):
            raise InvalidParam(f"unknown encoding {self.encoding!r}")
        if self.encoding == ENC_DELTA and self.kind in (KIND_STATE, KIND_ATTACH):
            raise InvalidParam(f"{self.name}: discrete channels are absolute only")

    def frames(self) -> list[int]:
        return [f for f, _ in self.samples]

    def set_sample(self, frame: int, value: object) -> None:
        """Insert or replace the sample at `frame`, keeping frames sorted."""
        frames = self.frames()
        i = bisect.bisect_left(frames, frame)
        if i < len(frames) and frames[i] == frame:
            self.samples[i] = (frame, value)
        else:
            self.samples.insert(i, (frame, value))

    def remove_range(self, lo: int, hi: int) -> int:
        """Drop samples with lo <= frame <= hi; returns how many went."""
        before = len(self.samples)
        self.samples = [(f, v) for f, v in self.samples if not (lo <= f <= hi)]
        return before - len(self.samples)

    def last_frame(self) -> int | None:
        return self.samples[-1][0] if self.samples else None

    def first_frame(self) -> int | None:
        return self.samples[0][0] if self.samples else None


def _interpolate(kind: str, a: object, b: object, t: float) -> object:
    if kind == KIND_SCALAR:
        return a + (b - a) * t  # type: ignore[operator]
    if kind == KIND_VEC3:
        return v_lerp(a, b, t)  # type: ignore[arg-type]
    if kind == KIND_QUAT:
        return q_slerp(a, b, t)  # type: ignore[arg-type]
    return a  # discrete kinds step


def _accumulate(kind: str, acc: object, delta: object) -> object:
    if kind == KIND_SCALAR:
        return acc + delta  # type: ignore[operator]
    if kind == KIND_VEC3:
        return v_add(acc, delta)  # type: ignore[arg-type]
    if kind == KIND_QUAT:
        return q_normalize(q_mul(acc, delta))  # type: ignore[arg-type]
    raise InvalidParam(f"cannot delta-encode kind {kind!r}")


def _difference(kind: str, prev: object, cur: object) -> object:
    if kind == KIND_SCALAR:
        return cur - prev  # type: ignore[operator]
    if kind == KIND_VEC3:
        return v_sub(cur, prev)  # type: ignore[arg-type]
    if kind == KIND_QUAT:
        return q_normalize(q_mul(q_conj(prev), cur))  # type: ignore[arg-type]
    raise InvalidParam(f"cannot delta-encode kind {kind!r}")


def channel_value_at(channel: Channel, frame: int, base: object) -> object | None:
    """Random-access evaluation; None when nothing is proposed yet.

    The cursor path below must agree with this bit-for-bit: delta channels
    accumulate samples left to right in both.
    """
    if not channel.samples:
        return None
    frames = channel.frames()
    i = bisect.bisect_right(frames, frame) - 1
    if i < 0:
        return None
    if channel.encoding == ENC_DELTA:
        acc = base
        for _, delta in channel.samples[: i + 1]:
            acc = _accumulate(channel.kind, acc, delta)
        return acc
    f_i, v_i = channel.samples[i]
    if frame == f_i or i + 1 >= len(channel.samples):
        return v_i
    if channel.kind in (KIND_STATE, KIND_ATTACH):
        return v_i
    f_n, v_n = channel.samples[i + 1]
    t = (frame - f_i) / (f_n - f_i)
    return _interpolate(channel.kind, v_i, v_n, t)


def to_delta(channel: Channel, base: object) -> Channel:
    """Re-encode as dense per-frame deltas over the channel's sampled span.

    Dense emission (one sample per frame) keeps the re-encoded channel equal
    to the absolute original at every integer frame, interpolation included.
    """
    if channel.encoding == ENC_DELTA:
        return channel
    if channel.kind in (KIND_STATE, KIND_ATTACH):
        raise InvalidParam(f"{channel.name}: discrete channels are absolute only")
    out = Channel(channel.name, ENC_DELTA)
    if not channel.samples:
        return out
    first = channel.first_frame()
    last = channel.last_frame()
    prev = base
    for f in range(first, last + 1):  # type: ignore[arg-type]
        cur = channel_value_at(channel, f, base)
        out.samples.append((f, _difference(channel.kind, prev, cur)))
        prev = cur
    return out


def to_absolute(channel: Channel, base: object) -> Channel:
    if channel.encoding == ENC_ABSOLUTE:
        return channel
    out = Channel(channel.name, ENC_ABSOLUTE)
    acc = base
    for f, delta in channel.samples:
        acc = _accumulate(channel.kind, acc, delta)
        out.samples.append((f, acc))
    return out


class _Cursor:
    """Monotone sample cursor; for delta channels it carries the running value."""

    __slots__ = ("idx", "acc")

    def __init__(self) -> None:
        self.idx = -1
        self.acc: object | None = None

    def value_at(self, channel: Channel, frame: int, base: object) -> object | None:
        samples = channel.samples
        n = len(samples)
        if channel.encoding == ENC_DELTA:
            while self.idx + 1 < n and samples[self.idx + 1][0] <= frame:
                self.idx += 1
                prev = base if self.acc is None else self.acc
                self.acc = _accumulate(channel.kind, prev, samples[self.idx][1])
            return None if self.idx < 0 else self.acc
        while self.idx + 1 < n and samples[self.idx + 1][0] <= frame:
            self.idx += 1
        if self.idx < 0:
            return None
        f_i, v_i = samples[self.idx]
        if frame == f_i or self.idx + 1 >= n:
            return v_i
        if channel.kind in (KIND_STATE, KIND_ATTACH):
            return v_i
        f_n, v_n = samples[self.idx + 1]
        t = (frame - f_i) / (f_n - f_i)
        return _interpolate(channel.kind, v_i, v_n, t)

    def snapshot(self) -> tuple[int, object | None]:
        return (self.idx, self.acc)

    def restore(self, snap: tuple[int, object | None]) -> None:
        self.idx, self.acc = snap


# --- captured initial state ------------------------------------------------


@dataclass(frozen=True)
class CapturedState:
    """Target state snapshot an effect measures changes against."""

    transform: Transform
    state: str | None = None
    pose: tuple[Vec3, ...] | None = None
    attached_to: tuple[str, str] | None = None

    def channel_base(self, name: str) -> object:
        if name == "position.x":
            return self.transform.position[0]
        if name == "position.y":
            return self.transform.position[1]
        if name == "position.z":
            return self.transform.position[2]
        if name == "rotation":
            return self.transform.rotation
        if name == "scale":
            return self.transform.scale
        if name.startswith("joint."):
            joint = name.split(".", 1)[1]
            pose = self.pose
            if pose is None:
                from .scene import DEFAULT_POSE

                pose = DEFAULT_POSE
            from .scene import JOINT_INDEX

            return pose[JOINT_INDEX[joint]]
        if name == "state":
            return self.state
        if name == "attachment":
            return None
        raise InvalidParam(f"unknown channel {name!r}")


def capture_from_object(obj: ControllableObject) -> CapturedState:
    snap = initial_snapshot(obj)
    return capture_from_snapshot(snap)


def capture_from_snapshot(snap: ObjectSnapshot) -> CapturedState:
    return CapturedState(
        transform=snap.transform,
        state=snap.state,
        pose=snap.pose,
        attached_to=snap.attached_to,
    )


# --- effect type registry ---------------------------------------------------

RIGID_TRANSFORM = "RigidTransform"
POSE_TRACK = "PoseTrack"
INTERACTIVE_STATE = "InteractiveState"
FLOATING_ARROWS = "FloatingArrows"
FIRE = "Fire"

_EXPLOSION_TYPES = ("none", "burst", "directional")
_FIREWALL_TYPES = ("none", "line", "ring")


@dataclass(frozen=True)
class ParamSpec:
    default: object
    check: Callable[[object], bool]
    required: bool = False


@dataclass(frozen=True)
class EffectTypeSpec:
    name: str
    writable: tuple[str, ...]
    params: dict[str, ParamSpec]
    target_check: Callable[[ControllableObject], str | None]


def _any_target(_: ControllableObject) -> str | None:
    return None


def _triggerable_target(obj: ControllableObject) -> str | None:
    if not obj.triggerable:
        return f"{obj.id!r} is not triggerable"
    return None


def _character_target(obj: ControllableObject) -> str | None:
    if obj.cls is not ObjectClass.CHARACTER:
        return f"{obj.id!r} is not a character"
    return None


EFFECT_TYPES: dict[str, EffectTypeSpec] = {
    RIGID_TRANSFORM: EffectTypeSpec(
        RIGID_TRANSFORM,
        writable=("attachment",) + POSITION_CHANNELS + ("rotation", "scale"),
        params={"physics": ParamSpec(False, lambda v: isinstance(v, bool))},
        target_check=_any_target,
    ),
    POSE_TRACK: EffectTypeSpec(
        POSE_TRACK,
        writable=POSITION_CHANNELS + ("rotation",) + JOINT_CHANNELS,
        params={},
        target_check=_character_target,
    ),
    INTERACTIVE_STATE: EffectTypeSpec(
        INTERACTIVE_STATE,
        writable=("state",),
        params={},
        target_check=_triggerable_target,
    ),
    FLOATING_ARROWS: EffectTypeSpec(
        FLOATING_ARROWS,
        writable=(),
        params={
            "dest": ParamSpec(None, lambda v: isinstance(v, str) and bool(v), required=True),
            "cycle": ParamSpec(30, lambda v: isinstance(v, int) and not isinstance(v, bool) and v > 0),
        },
        target_check=_any_target,
    ),
    FIRE: EffectTypeSpec(
        FIRE,
        writable=(),
        params={
            "apply_fire": ParamSpec(True, lambda v: isinstance(v, bool)),
            "explosion_type": ParamSpec("none", lambda v: v in _EXPLOSION_TYPES),
            "firewall_type": ParamSpec("none", lambda v: v in _FIREWALL_TYPES),
        },
        target_check=_any_target,
    ),
}


def validate_params(effect_type: str, params: dict[str, object]) -> dict[str, object]:
    """Fill defaults and reject unknown or ill-typed parameters."""
    try:
        spec = EFFECT_TYPES[effect_type]
    except KeyError:
        raise UnknownEffect(f"unknown effect type {effect_type!r}") from None
    out: dict[str, object] = {}
    for key, value in params.items():
        if key not in spec.params:
            raise InvalidParam(f"{effect_type}: unknown parameter {key!r}")
        if not spec.params[key].check(value):
            raise InvalidParam(f"{effect_type}: bad value for {key!r}: {value!r}")
        out[key] = value
    for key, pspec in spec.params.items():
        if key not in out:
            if pspec.required:
                raise InvalidParam(f"{effect_type}: missing required parameter {key!r}")
            out[key] = pspec.default
    return out


def check_target(effect_type: str, target: ControllableObject) -> None:
    spec = EFFECT_TYPES[effect_type]
    problem = spec.target_check(target)
    if problem is not None:
        raise IncompatibleTarget(f"{effect_type}: {problem}")


@dataclass
class EffectInstance:
    id: str
    type: str
    target_id: str
    params: dict[str, object]
    channels: dict[str, Channel] = field(default_factory=dict)
    captured_initial: CapturedState = field(
        default_factory=lambda: CapturedState(Transform())
    )

    def channel(self, name: str) -> Channel:
        """Fetch or create one of this effect type's writable channels."""
        spec = EFFECT_TYPES[self.type]
        if name not in spec.writable:
            raise InvalidParam(f"{self.type} cannot write channel {name!r}")
        if name not in self.channels:
            self.channels[name] = Channel(name)
        return self.channels[name]

    def record_event(self, frame: int, state: str, declared: tuple[str, ...]) -> None:
        if state not in declared:
            raise InvalidState(f"state {state!r} not declared on {self.target_id!r}")
        self.channel("state").set_sample(frame, state)


# --- signals ----------------------------------------------------------------

SIG_START = "START"
SIG_UPDATE = "UPDATE"
SIG_PAUSE = "PAUSE"


@dataclass(frozen=True)
class SignalRecord:
    effect_id: str
    signal: str
    frame: int
    during_scan: bool


@dataclass(frozen=True)
class DecorationRequest:
    """Raw decoration emitted by an update; endpoints resolve in a later pass."""

    kind: str
    effect_id: str
    detail: tuple[tuple[str, object], ...]


class EffectRuntime:
    """Per-playback evaluator for one effect instance.

    Frames must be fed in non-decreasing order between snapshot restores.
    """

    def __init__(self, effect: EffectInstance, slot_start: int, slot_end: int, fps: int):
        self.effect = effect
        self.slot_start = slot_start
        self.slot_end = slot_end
        self.fps = fps
        self.started = False
        self._cursors: dict[str, _Cursor] = {name: _Cursor() for name in effect.channels}
        self._physics_ref: tuple[int, Vec3, Vec3] | None = None

    # -- signal protocol --

    def start(self, frame: int, log: list[SignalRecord] | None, during_scan: bool) -> None:
        if not (self.slot_start <= frame <= self.slot_end):
            raise FrameOutOfSlot(
                f"frame {frame} outside slot [{self.slot_start}, {self.slot_end}]"
            )
        self.started = True
        if log is not None:
            log.append(SignalRecord(self.effect.id, SIG_START, frame, during_scan))

    def pause(self, frame: int, log: list[SignalRecord] | None, during_scan: bool) -> None:
        if not self.started:
            raise NotStarted(f"effect {self.effect.id} got PAUSE before START")
        self.started = False
        if log is not None:
            log.append(SignalRecord(self.effect.id, SIG_PAUSE, frame, during_scan))

    def update(
        self,
        frame: int,
        ctx: "UpdateContext",
        log: list[SignalRecord] | None,
        during_scan: bool,
    ) -> tuple[list[tuple[str, object]], list[DecorationRequest]]:
        if not self.started:
            raise NotStarted(f"effect {self.effect.id} got UPDATE before START")
        if not (self.slot_start <= frame <= self.slot_end):
            raise FrameOutOfSlot(
                f"frame {frame} outside slot [{self.slot_start}, {self.slot_end}]"
            )
        if log is not None:
            log.append(SignalRecord(self.effect.id, SIG_UPDATE, frame, during_scan))
        return self._evaluate(frame, ctx)

    # -- evaluation --

    def _channel_value(self, name: str, frame: int) -> object | None:
        chan = self.effect.channels.get(name)
        if chan is None or not chan.samples:
            return None
        cursor = self._cursors.get(name)
        if cursor is None:
            cursor = self._cursors[name] = _Cursor()
        base = self.effect.captured_initial.channel_base(name)
        return cursor.value_at(chan, frame, base)

    def _evaluate(
        self, frame: int, ctx: "UpdateContext"
    ) -> tuple[list[tuple[str, object]], list[DecorationRequest]]:
        effect = self.effect
        writes: list[tuple[str, object]] = []
        decorations: list[DecorationRequest] = []
        if effect.type == FLOATING_ARROWS:
            cycle = effect.params["cycle"]
            decorations.append(
                DecorationRequest(
                    "arrow",
                    effect.id,
                    (
                        ("source", effect.target_id),
                        ("dest", effect.params["dest"]),
                        ("phase", (frame % cycle) / cycle),
                    ),
                )
            )
            return writes, decorations
        if effect.type == FIRE:
            decorations.append(
                DecorationRequest(
                    "fire",
                    effect.id,
                    (
                        ("target", effect.target_id),
                        ("burning", effect.params["apply_fire"]),
                        ("explosion_type", effect.params["explosion_type"]),
                        ("firewall_type", effect.params["firewall_type"]),
                    ),
                )
            )
            return writes, decorations

        names = [n for n in effect.channels if effect.channels[n].samples]
        names.sort(key=lambda n: _CHANNEL_RANK[n])
        for name in names:
            value = self._channel_value(name, frame)
            if value is not None or (name == "attachment" and self._attach_written(frame)):
                writes.append((name, value))

        if effect.type == RIGID_TRANSFORM and effect.params.get("physics"):
            self._apply_physics(frame, ctx, writes)
        return writes, decorations

    def _attach_written(self, frame: int) -> bool:
        # attachment None is a meaningful write (detach), not a missing value
        chan = self.effect.channels.get("attachment")
        if chan is None or not chan.samples:
            return False
        return chan.samples[0][0] <= frame

    def _attached_at(self, frame: int) -> bool:
        chan = self.effect.channels.get("attachment")
        if chan is not None and chan.samples and chan.samples[0][0] <= frame:
            frames = chan.frames()
            i = bisect.bisect_right(frames, frame) - 1
            return chan.samples[i][1] is not None
        return self.effect.captured_initial.attached_to is not None

    def _last_position_keyframe(self) -> int | None:
        last = None
        for name in POSITION_CHANNELS:
            chan = self.effect.channels.get(name)
            if chan is not None and chan.samples:
                f = chan.last_frame()
                last = f if last is None else max(last, f)
        return last

    def _last_detach_frame(self, frame: int) -> int | None:
        chan = self.effect.channels.get("attachment")
        if chan is None or not chan.samples:
            return None
        frames = chan.frames()
        i = bisect.bisect_right(frames, frame) - 1
        if i < 0 or chan.samples[i][1] is not None:
            return None
        return chan.samples[i][0]

    def _position_eval(self, frame: int) -> Vec3:
        out = []
        captured = self.effect.captured_initial
        for name in POSITION_CHANNELS:
            chan = self.effect.channels.get(name)
            base = captured.channel_base(name)
            v = channel_value_at(chan, frame, base) if chan is not None else None
            out.append(base if v is None else v)
        return (out[0], out[1], out[2])

    def _apply_physics(
        self, frame: int, ctx: "UpdateContext", writes: list[tuple[str, object]]
    ) -> None:
        """Ballistic hand-off after the last authored keyframe or detach."""
        if self._attached_at(frame):
            return
        k = self._last_position_keyframe()
        d = self._last_detach_frame(frame)
        base = self.slot_start - 1
        if k is not None:
            base = max(base, k)
        if d is not None:
            base = max(base, d)
        if frame <= base:
            return
        if self._physics_ref is None or self._physics_ref[0] != base:
            self._physics_ref = (base, *self._handoff(base, d, k, ctx))
        _, p_ref, v_ref = self._physics_ref
        t = (frame - base) / self.fps
        t = min(t, self._stop_time(p_ref, v_ref, ctx))
        x = p_ref[0] + v_ref[0] * t
        y = p_ref[1] + v_ref[1] * t - 0.5 * GRAVITY * t * t
        z = p_ref[2] + v_ref[2] * t
        writes.append(("position.x", x))
        writes.append(("position.y", max(y, 0.0)))
        writes.append(("position.z", z))

    def _handoff(
        self, base: int, d: int | None, k: int | None, ctx: "UpdateContext"
    ) -> tuple[Vec3, Vec3]:
        captured = self.effect.captured_initial
        if d is not None and d == base:
            # frozen world after a detach; velocity from resolved motion
            p_ref = ctx.world_position(self.effect.target_id, base)
            prev = ctx.world_position(self.effect.target_id, base - 1)
            if prev is None or p_ref is None:
                p_ref = p_ref if p_ref is not None else captured.transform.position
                return p_ref, (0.0, 0.0, 0.0)
            v_ref = (
                (p_ref[0] - prev[0]) * self.fps,
                (p_ref[1] - prev[1]) * self.fps,
                (p_ref[2] - prev[2]) * self.fps,
            )
            return p_ref, v_ref
        if k is not None and k == base:
            p_ref = self._position_eval(k)
            prev = self._position_eval(k - 1) if k - 1 >= 0 else p_ref
            v_ref = (
                (p_ref[0] - prev[0]) * self.fps,
                (p_ref[1] - prev[1]) * self.fps,
                (p_ref[2] - prev[2]) * self.fps,
            )
            return p_ref, v_ref
        # No keyframe or detach anchors the hand-off: take over from the
        # object's resolved world motion at the frame before the slot.
        p_ref = ctx.world_position(self.effect.target_id, base) if base >= 0 else None
        if p_ref is None:
            return captured.transform.position, (0.0, 0.0, 0.0)
        prev = ctx.world_position(self.effect.target_id, base - 1) if base >= 1 else None
        if prev is None:
            return p_ref, (0.0, 0.0, 0.0)
        return p_ref, (
            (p_ref[0] - prev[0]) * self.fps,
            (p_ref[1] - prev[1]) * self.fps,
            (p_ref[2] - prev[2]) * self.fps,
        )

    def _stop_time(self, p: Vec3, v: Vec3, ctx: "UpdateContext") -> float:
        if p[1] <= 0.0:
            return 0.0
        # positive root of p_y + v_y t - g/2 t^2 = 0
        g2 = 0.5 * GRAVITY
        t_ground = (v[1] + math.sqrt(v[1] * v[1] + 4.0 * g2 * p[1])) / (2.0 * g2)
        t_stop = t_ground
        vx, vz = v[0], v[2]
        speed = math.hypot(vx, vz)
        if speed > 0.0 and ctx.walls:
            a = (p[0], p[2])
            b = (p[0] + vx * t_ground, p[2] + vz * t_ground)
            for wall in ctx.walls:
                from .mathx import seg_intersect

                t = seg_intersect(a, b, wall.a, wall.b)
                if t is not None and t > 0.0:
                    t_stop = min(t_stop, t * t_ground)
        return t_stop

    # -- checkpointing --

    def snapshot(self) -> dict[str, object]:
        return {
            "started": self.started,
            "cursors": {name: c.snapshot() for name, c in self._cursors.items()},
            "physics": self._physics_ref,
        }

    def restore(self, snap: dict[str, object]) -> None:
        self.started = snap["started"]  # type: ignore[assignment]
        self._cursors = {}
        for name, cur_snap in snap["cursors"].items():  # type: ignore[union-attr]
            cursor = _Cursor()
            cursor.restore(cur_snap)
            self._cursors[name] = cursor
        self._physics_ref = snap["physics"]  # type: ignore[assignment]


class UpdateContext:
    """Read access an update gets into the resolution pipeline."""

    def __init__(self, walls, world_history):
        self.walls = walls
        self._world_history = world_history  # object id -> {frame: Vec3}

    def world_position(self, object_id: str, frame: int) -> Vec3 | None:
        hist = self._world_history.get(object_id)
        if hist is None:
            return None
        return hist.get(frame)
