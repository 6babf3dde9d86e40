"""Deterministic playback: frame scanning, transport, recording, traces.

``state_at`` has one meaning only: reset to frame 0 and walk every frame up
to the query, applying each active effect's proposals in ascending priority
(higher track index first, then effect order inside the slot, later writes
winning). Channels may be delta-encoded, so there is no shortcut past the
scan; a checkpoint cache makes repeated queries cheap without changing a
single resolved bit (an uncached scan must produce identical output).

Signals follow the per-effect grammar (START UPDATE* PAUSE)* — scans close
every effect they started with a PAUSE, so a later live START is legal.

Canonical transcripts, for one effect in a slot over frames [10, 20] of a
25-frame project (S/U/P = START/UPDATE/PAUSE; "scan" marks catch-up
records, everything else is live):

- play from frame 0, run to the natural end:
    S@10  U@10..20  P@20
- seek to 15 while stopped, then play and run to the end:
    scan: S@10  U@10..15  P@15   then live: S@15  U@15..20  P@20
  (the catch-up scan replays 0..15 and closes what it started; the live
  pass re-enters the slot at the cursor)
- play from 0, step until the cursor reads 17, pause:
    S@10  U@10..16  P@17
  (pause stamps the cursor, the next unprocessed frame)
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

from .effects import (
    INTERACTIVE_STATE,
    POSE_TRACK,
    RIGID_TRANSFORM,
    DecorationRequest,
    EffectInstance,
    EffectRuntime,
    SignalRecord,
    UpdateContext,
    capture_from_snapshot,
)
from .errors import (
    CycleRejected,
    InvalidRange,
    InvalidState,
    InvalidTransportTransition,
    LockedTrack,
    RecordingError,
    UnknownAnchor,
    UnknownEffect,
    UnknownTarget,
)
from .mathx import (
    Quat,
    Transform,
    Vec3,
    t_compose,
    t_relative,
)
from .project import Project
from .scene import (
    CHARACTER_ANCHORS,
    JOINT_INDEX,
    Decoration,
    ObjectSnapshot,
    SceneState,
    initial_snapshot,
)

CHECKPOINT_INTERVAL = 300


# --- working state ----------------------------------------------------------


class _ObjectWork:
    """Mutable per-object fields the scan writes into."""

    __slots__ = ("position", "rotation", "scale", "state", "pose", "attachment", "decorations")

    def __init__(
        self,
        position: Vec3,
        rotation: Quat,
        scale: Vec3,
        state: str | None,
        pose: tuple[Vec3, ...] | None,
        attachment: tuple[str, str, Transform | None] | None,
    ):
        self.position = list(position)
        self.rotation = rotation
        self.scale = scale
        self.state = state
        self.pose = list(pose) if pose is not None else None
        self.attachment = attachment
        self.decorations: list[Decoration] = []

    def local_transform(self) -> Transform:
        return Transform(tuple(self.position), self.rotation, self.scale)


class _Accumulator:
    def __init__(self, project: Project):
        self.project = project
        self.objects: dict[str, _ObjectWork] = {}
        for oid, obj in project.scene.objects.items():
            snap = initial_snapshot(obj)
            attachment = None
            if obj.attachment is not None:
                # static attachments treat the object's own transform as the
                # local offset under the parent anchor
                attachment = (obj.attachment[0], obj.attachment[1], None)
            self.objects[oid] = _ObjectWork(
                snap.transform.position,
                snap.transform.rotation,
                snap.transform.scale,
                snap.state,
                snap.pose,
                attachment,
            )
        self.worlds: dict[str, Transform] = {}
        self.prev_frame = -1
        self.world_history: dict[str, dict[int, Vec3]] = {oid: {} for oid in self.objects}
        self._resolve_worlds()
        for oid, world in self.worlds.items():
            hist = self.world_history[oid]
            hist[-1] = world.position
            hist[-2] = world.position

    # -- writes --

    def apply(self, oid: str, name: str, value: object) -> None:
        work = self.objects[oid]
        if name == "position.x":
            work.position[0] = value  # type: ignore[assignment]
        elif name == "position.y":
            work.position[1] = value  # type: ignore[assignment]
        elif name == "position.z":
            work.position[2] = value  # type: ignore[assignment]
        elif name == "rotation":
            work.rotation = value  # type: ignore[assignment]
        elif name == "scale":
            work.scale = value  # type: ignore[assignment]
        elif name == "state":
            work.state = value  # type: ignore[assignment]
        elif name.startswith("joint."):
            if work.pose is None:
                return  # pose channels only land on characters
            work.pose[JOINT_INDEX[name.split(".", 1)[1]]] = value  # type: ignore[index]
        elif name == "attachment":
            if value is None:
                if work.attachment is not None:
                    # during frame f, self.worlds still holds frame f-1:
                    # keep the world pose it had; no snap-back
                    frozen = self.worlds.get(oid)
                    if frozen is not None:
                        work.position = list(frozen.position)
                        work.rotation = frozen.rotation
                        work.scale = frozen.scale
                work.attachment = None
            else:
                parent_id, anchor, local = value  # type: ignore[misc]
                work.attachment = (parent_id, anchor, local)

    # -- world resolution --

    def _anchor_world(self, parent_id: str, parent_world: Transform, anchor: str) -> Transform:
        parent = self.objects[parent_id]
        joint = CHARACTER_ANCHORS.get(anchor)
        if joint is None or parent.pose is None:
            raise UnknownAnchor(f"{parent_id!r} has no anchor {anchor!r}")
        joint_world = parent_world.apply(parent.pose[JOINT_INDEX[joint]])
        return Transform(position=joint_world, rotation=parent_world.rotation)

    def _resolve_worlds(self) -> None:
        worlds: dict[str, Transform] = {}
        resolving: set[str] = set()

        def resolve(oid: str) -> Transform:
            cached = worlds.get(oid)
            if cached is not None:
                return cached
            if oid in resolving:
                raise CycleRejected(f"attachment loop through {oid!r}")
            resolving.add(oid)
            work = self.objects[oid]
            if work.attachment is None:
                world = work.local_transform()
            else:
                parent_id, anchor, local = work.attachment
                if parent_id not in self.objects:
                    raise UnknownTarget(f"{oid!r} attached to missing {parent_id!r}")
                anchor_world = self._anchor_world(parent_id, resolve(parent_id), anchor)
                offset = local if local is not None else work.local_transform()
                world = t_compose(anchor_world, offset)
            resolving.discard(oid)
            worlds[oid] = world
            return world

        for oid in self.objects:
            resolve(oid)
        self.worlds = worlds

    def finish_frame(self, frame: int) -> None:
        self._resolve_worlds()
        self.prev_frame = frame
        for oid, world in self.worlds.items():
            hist = self.world_history[oid]
            hist[frame] = world.position
            hist.pop(frame - 3, None)  # physics hand-off needs two frames back

    def snapshot_state(self, frame: int) -> SceneState:
        objects: dict[str, ObjectSnapshot] = {}
        for oid, work in self.objects.items():
            attached = None
            if work.attachment is not None:
                attached = (work.attachment[0], work.attachment[1])
            objects[oid] = ObjectSnapshot(
                transform=self.worlds[oid],
                state=work.state,
                pose=tuple(work.pose) if work.pose is not None else None,
                attached_to=attached,
                decorations=tuple(work.decorations),
            )
        return SceneState(frame=frame, objects=objects, floor_plan=self.project.scene.floor_plan)

    # -- checkpointing --

    def snapshot(self) -> dict[str, object]:
        objs = {}
        for oid, w in self.objects.items():
            objs[oid] = (
                tuple(w.position),
                w.rotation,
                w.scale,
                w.state,
                tuple(w.pose) if w.pose is not None else None,
                w.attachment,
                tuple(w.decorations),
            )
        history = {oid: dict(h) for oid, h in self.world_history.items()}
        return {
            "objects": objs,
            "worlds": dict(self.worlds),
            "prev_frame": self.prev_frame,
            "history": history,
        }

    def restore(self, snap: dict[str, object]) -> None:
        for oid, packed in snap["objects"].items():  # type: ignore[union-attr]
            pos, rot, scale, state, pose, attachment, decorations = packed
            w = self.objects[oid]
            w.position = list(pos)
            w.rotation = rot
            w.scale = scale
            w.state = state
            w.pose = list(pose) if pose is not None else None
            w.attachment = attachment
            w.decorations = list(decorations)
        self.worlds = dict(snap["worlds"])  # type: ignore[arg-type]
        self.prev_frame = snap["prev_frame"]  # type: ignore[assignment]
        self.world_history = {oid: dict(h) for oid, h in snap["history"].items()}  # type: ignore[union-attr]


# --- the scan ----------------------------------------------------------------


class _ScanMachine:
    """Walks frames in order, feeding signals and writes through the stack."""

    def __init__(self, project: Project, signal_log: list[SignalRecord] | None = None):
        self.project = project
        self.acc = _Accumulator(project)
        self.log = signal_log
        self.runtimes: dict[str, EffectRuntime] = {}
        for track in project.timeline.tracks:
            for slot in track.slots:
                for effect in slot.effects:
                    self.runtimes[effect.id] = EffectRuntime(
                        effect, slot.start, slot.end, project.frame_rate
                    )
        self.next_frame = 0

    def context(self) -> UpdateContext:
        return UpdateContext(self.project.scene.floor_plan.walls, self.acc.world_history)

    def process_frame(self, frame: int, during_scan: bool) -> None:
        """Run one frame: signals, proposals, priority application, worlds."""
        acc = self.acc
        for work in acc.objects.values():
            work.decorations = []
        ctx = self.context()
        pending_decorations: list[DecorationRequest] = []
        for track in reversed(self.project.timeline.tracks):  # ascending priority
            if track.muted:
                continue
            slot = self.project.timeline.slot_at(track, frame)
            if slot is None:
                continue
            for effect in slot.effects:
                runtime = self.runtimes[effect.id]
                if not runtime.started:
                    runtime.start(frame, self.log, during_scan)
                writes, decorations = runtime.update(frame, ctx, self.log, during_scan)
                for name, value in writes:
                    acc.apply(effect.target_id, name, value)
                pending_decorations.extend(decorations)
                if frame == slot.end:
                    runtime.pause(frame, self.log, during_scan)
        acc.finish_frame(frame)
        self._place_decorations(pending_decorations)
        self.next_frame = frame + 1

    def _place_decorations(self, requests: list[DecorationRequest]) -> None:
        for req in requests:
            detail = dict(req.detail)
            if req.kind == "arrow":
                source = detail["source"]
                dest = detail["dest"]
                if source not in self.acc.worlds or dest not in self.acc.worlds:
                    raise UnknownTarget(f"arrow endpoints {source!r}->{dest!r}")
                detail["from"] = self.acc.worlds[source].position
                detail["to"] = self.acc.worlds[dest].position
                owner = source
            else:
                owner = detail["target"]
                if owner not in self.acc.objects:
                    raise UnknownTarget(f"decoration target {owner!r}")
            self.acc.objects[owner].decorations.append(
                Decoration(kind=req.kind, effect_id=req.effect_id, detail=tuple(detail.items()))
            )

    def run_to(self, frame: int, during_scan: bool = True) -> None:
        for f in range(self.next_frame, frame + 1):
            self.process_frame(f, during_scan)

    def close_open_effects(self, frame: int, during_scan: bool) -> None:
        for runtime in self.runtimes.values():
            if runtime.started:
                runtime.pause(frame, self.log, during_scan)

    def snapshot(self) -> dict[str, object]:
        return {
            "acc": self.acc.snapshot(),
            "runtimes": {eid: r.snapshot() for eid, r in self.runtimes.items()},
            "next_frame": self.next_frame,
        }

    def restore(self, snap: dict[str, object]) -> None:
        self.acc.restore(snap["acc"])  # type: ignore[arg-type]
        for eid, rsnap in snap["runtimes"].items():  # type: ignore[union-attr]
            self.runtimes[eid].restore(rsnap)
        self.next_frame = snap["next_frame"]  # type: ignore[assignment]


@dataclass
class _Cache:
    revision: int
    checkpoints: list[tuple[int, dict[str, object]]] = field(default_factory=list)


def _clamp_frame(project: Project, frame: int) -> int:
    return max(0, min(frame, project.duration))


def state_at(project: Project, frame: int, naive: bool = False) -> SceneState:
    """Resolved scene state at a frame (clamped into [0, duration]).

    ``naive=True`` bypasses the checkpoint cache; both paths must agree
    bit for bit, which the test suite holds them to.
    """
    target = _clamp_frame(project, frame)
    if naive:
        machine = _ScanMachine(project)
        machine.run_to(target)
        return machine.acc.snapshot_state(target)

    cache = project.cache
    if not isinstance(cache, _Cache) or cache.revision != project.revision:
        cache = _Cache(revision=project.revision)
        project.cache = cache
    machine = _ScanMachine(project)
    resume = -1
    for cp_frame, snap in reversed(cache.checkpoints):
        if cp_frame <= target:
            machine.restore(snap)
            resume = cp_frame
            break
    known = {cp for cp, _ in cache.checkpoints}
    for f in range(resume + 1, target + 1):
        machine.process_frame(f, during_scan=True)
        if f % CHECKPOINT_INTERVAL == 0 and f not in known:
            cache.checkpoints.append((f, machine.snapshot()))
            cache.checkpoints.sort(key=lambda item: item[0])
            known.add(f)
    return machine.acc.snapshot_state(target)


def export_trace(
    project: Project, start: int = 0, end: int | None = None, stride: int = 1
) -> list[SceneState]:
    """Resolved states at start, start+stride, ... <= end, from one pass."""
    if end is None:
        end = project.duration
    if start < 0 or end > project.duration or start > end or stride < 1:
        raise InvalidRange(
            f"trace range [{start}, {end}] stride {stride} outside [0, {project.duration}]"
        )
    wanted = range(start, end + 1, stride)
    wanted_set = set(wanted)
    machine = _ScanMachine(project)
    out: list[SceneState] = []
    for f in range(0, end + 1):
        machine.process_frame(f, during_scan=True)
        if f in wanted_set:
            out.append(machine.acc.snapshot_state(f))
    return out


def ground_paths(
    states: list[SceneState], object_ids: list[str]
) -> dict[str, list[tuple[int, tuple[float, float]]]]:
    """Timed floor-plane paths for the given objects, one entry per state."""
    out: dict[str, list[tuple[int, tuple[float, float]]]] = {oid: [] for oid in object_ids}
    for state in states:
        for oid in object_ids:
            out[oid].append((state.frame, state.ground(oid)))
    return out


# --- transport ---------------------------------------------------------------

MODE_STOPPED = "stopped"
MODE_PLAYING = "playing"
MODE_PAUSED = "paused"
MODE_RECORDING = "recording"

_TRANSITIONS = {
    (MODE_STOPPED, MODE_PLAYING),
    (MODE_PLAYING, MODE_STOPPED),  # natural end only
    (MODE_PLAYING, MODE_PAUSED),
    (MODE_PAUSED, MODE_PLAYING),
    (MODE_STOPPED, MODE_RECORDING),
    (MODE_PAUSED, MODE_RECORDING),
    (MODE_RECORDING, MODE_PAUSED),
}


class Player:
    """Transport over one project. ``cursor`` is the next frame to process."""

    def __init__(self, project: Project):
        self.project = project
        self.cursor = 0
        self.mode = MODE_STOPPED
        self.signal_log: list[SignalRecord] = []
        self._machine: _ScanMachine | None = None
        self._recording: RecordingSession | None = None

    def _require(self, new_mode: str) -> None:
        if (self.mode, new_mode) not in _TRANSITIONS:
            raise InvalidTransportTransition(f"{self.mode} -> {new_mode}")

    def play(self) -> None:
        """Catch-up scan 0..cursor, then live playback from the cursor."""
        self._require(MODE_PLAYING)
        machine = _ScanMachine(self.project, self.signal_log)
        scan_end = min(self.cursor, self.project.duration)
        machine.run_to(scan_end, during_scan=True)
        machine.close_open_effects(scan_end, during_scan=True)
        machine.next_frame = self.cursor
        self._machine = machine
        self.mode = MODE_PLAYING

    def step(self) -> int:
        """Process one live frame; returns the frame just played."""
        if self.mode != MODE_PLAYING or self._machine is None:
            raise InvalidTransportTransition(f"step while {self.mode}")
        frame = self.cursor
        self._machine.process_frame(frame, during_scan=False)
        if frame >= self.project.duration:
            self._machine.close_open_effects(frame, during_scan=False)
            self.mode = MODE_STOPPED
            self.cursor = self.project.duration
            self._machine = None
        else:
            self.cursor = frame + 1
        return frame

    def run(self) -> int:
        """Play through to the natural end; returns frames processed."""
        count = 0
        while self.mode == MODE_PLAYING:
            self.step()
            count += 1
        return count

    def pause(self) -> None:
        # recording must end through stop_recording, never a bare pause
        if self.mode != MODE_PLAYING:
            raise InvalidTransportTransition(f"{self.mode} -> {MODE_PAUSED}")
        if self._machine is not None:
            self._machine.close_open_effects(self.cursor, during_scan=False)
        self.mode = MODE_PAUSED

    def seek(self, frame: int) -> int:
        """Clamp into [0, duration]; while playing, state rebuilds and rolls on."""
        if self.mode == MODE_PLAYING and self._machine is not None:
            # the interrupted live pass closes its effects like a pause would
            self._machine.close_open_effects(self.cursor, during_scan=False)
        self.cursor = _clamp_frame(self.project, frame)
        if self.mode == MODE_PLAYING:
            machine = _ScanMachine(self.project, self.signal_log)
            machine.run_to(self.cursor, during_scan=True)
            machine.close_open_effects(self.cursor, during_scan=True)
            machine.next_frame = self.cursor
            self._machine = machine
        return self.cursor

    def current_state(self) -> SceneState:
        return state_at(self.project, min(self.cursor, self.project.duration))

    def start_recording(self, slot_id: str, effect_id: str) -> "RecordingSession":
        self._require(MODE_RECORDING)
        session = RecordingSession(self.project, slot_id, effect_id)
        self._recording = session
        self.mode = MODE_RECORDING
        return session

    def stop_recording(self) -> "RecordingSummary":
        self._require(MODE_PAUSED)
        if self._recording is None:
            raise InvalidTransportTransition("no live recording")
        summary = self._recording.finalize()
        self._recording = None
        self.mode = MODE_PAUSED
        self.cursor = summary.last_frame
        return summary


# --- recording ---------------------------------------------------------------


@dataclass(frozen=True)
class InputSample:
    """One tracked device sample; seconds are relative to recording start."""

    t: float
    position: Vec3 | None = None
    rotation: Quat | None = None
    joints: dict[str, Vec3] | None = None


@dataclass(frozen=True)
class GrabEvent:
    t: float
    prop_id: str
    hand: str = "right"


@dataclass(frozen=True)
class ReleaseEvent:
    t: float
    hand: str = "right"


@dataclass(frozen=True)
class TriggerEvent:
    t: float
    prop_id: str
    state: str


@dataclass(frozen=True)
class RecordingSummary:
    frames_written: int
    last_frame: int
    created_effects: tuple[str, ...]


_HAND_ANCHORS = {"left": "left_hand", "right": "right_hand"}


class RecordingSession:
    """Buffers device input, then writes it into the selected effect.

    Movement lands only on the selected effect's channels; grab/release and
    trigger events append companion effects to the same slot (reusing an
    existing instance when the type/target pair already exists).
    """

    def __init__(self, project: Project, slot_id: str, effect_id: str):
        self.project = project
        track, slot = project.timeline.find_slot(slot_id)
        if track.locked:
            raise LockedTrack(f"track {track.id!r} is locked")
        self.track = track
        self.slot = slot
        self.effect = next((e for e in slot.effects if e.id == effect_id), None)
        if self.effect is None:
            raise UnknownEffect(f"effect {effect_id!r} not in slot {slot_id!r}")
        self.samples: list[InputSample] = []
        self.events: list[GrabEvent | ReleaseEvent | TriggerEvent] = []
        self._held: dict[str, str] = {}
        self._refresh_captured_initial()

    def _refresh_captured_initial(self) -> None:
        """Re-capture the target's state just before the slot begins."""
        if self.slot.start == 0:
            snap = initial_snapshot(self.project.scene.get(self.effect.target_id))
        else:
            state = state_at(self.project, self.slot.start - 1)
            snap = state.objects[self.effect.target_id]
        self.effect.captured_initial = capture_from_snapshot(snap)

    def ingest(self, sample: InputSample) -> None:
        if sample.t < 0:
            raise RecordingError("sample before recording start")
        self.samples.append(sample)

    def push_event(self, event: GrabEvent | ReleaseEvent | TriggerEvent) -> None:
        if event.t < 0:
            raise RecordingError("event before recording start")
        self.events.append(event)

    # -- finalization --

    def _frame_for(self, t: float) -> int:
        fps = self.project.frame_rate
        return min(self.slot.end, self.slot.start + int(math.floor(t * fps + 1e-9)))

    def finalize(self) -> RecordingSummary:
        slot = self.slot
        created: list[str] = []
        last_frame = slot.start
        frames_written = 0
        if self.samples or self.events:
            times = [s.t for s in self.samples] + [e.t for e in self.events]
            last_frame = self._frame_for(max(times))

        if self.samples:
            frames_written = self._write_movement(last_frame)

        for event in sorted(self.events, key=lambda e: e.t):
            frame = self._frame_for(event.t)
            if isinstance(event, TriggerEvent):
                self._append_trigger(frame, event, created)
            elif isinstance(event, GrabEvent):
                self._append_grab(frame, event, created)
            else:
                self._append_release(frame, event)
        self.project.bump()
        return RecordingSummary(
            frames_written=frames_written,
            last_frame=last_frame,
            created_effects=tuple(created),
        )

    def _write_movement(self, last_frame: int) -> int:
        """Resample buffered samples onto the frame grid (punch-in overwrite)."""
        fps = self.project.frame_rate
        slot = self.slot
        effect = self.effect
        samples = sorted(self.samples, key=lambda s: s.t)
        times = [s.t for s in samples]
        wrote = 0
        touched: set[str] = set()
        writable = set(
            name
            for name in ("position.x", "position.y", "position.z", "rotation")
            if name in _writable_names(effect)
        )
        joint_ok = effect.type == POSE_TRACK
        for frame in range(slot.start, last_frame + 1):
            t_f = (frame - slot.start) / fps
            i = bisect.bisect_right(times, t_f + 1e-9) - 1
            if i < 0:
                continue  # no sample at or before this frame's time yet
            sample = samples[i]
            if sample.position is not None and "position.x" in writable:
                for name, value in zip(
                    ("position.x", "position.y", "position.z"), sample.position
                ):
                    self._punch(name, frame, value, slot.start, last_frame, touched)
            if sample.rotation is not None and "rotation" in writable:
                self._punch("rotation", frame, sample.rotation, slot.start, last_frame, touched)
            if sample.joints and joint_ok:
                for joint, value in sample.joints.items():
                    self._punch(
                        f"joint.{joint}", frame, value, slot.start, last_frame, touched
                    )
            wrote += 1
        return wrote

    def _punch(
        self, name: str, frame: int, value: object, lo: int, hi: int, touched: set[str]
    ) -> None:
        chan = self.effect.channel(name)
        if name not in touched:
            chan.remove_range(lo, hi)
            touched.add(name)
        chan.set_sample(frame, value)

    def _find_or_create(
        self, effect_type: str, target_id: str, created: list[str]
    ) -> EffectInstance:
        for existing in self.slot.effects:
            if existing.type == effect_type and existing.target_id == target_id:
                return existing
        effect = self.project.timeline.attach_effect(
            self.project.scene, self.slot.id, effect_type, target_id, {}
        )
        created.append(effect.id)
        return effect

    def _append_trigger(self, frame: int, event: TriggerEvent, created: list[str]) -> None:
        target = self.project.scene.get(event.prop_id)
        if not target.triggerable:
            raise InvalidState(f"{event.prop_id!r} is not triggerable")
        effect = self._find_or_create(INTERACTIVE_STATE, event.prop_id, created)
        effect.record_event(frame, event.state, target.states)

    def _append_grab(self, frame: int, event: GrabEvent, created: list[str]) -> None:
        anchor = _HAND_ANCHORS.get(event.hand)
        if anchor is None:
            raise RecordingError(f"unknown hand {event.hand!r}")
        effect = self._find_or_create(RIGID_TRANSFORM, event.prop_id, created)
        write_grab_keyframes(self.project, effect, frame, self.effect.target_id, anchor)
        self._held[event.hand] = event.prop_id

    def _append_release(self, frame: int, event: ReleaseEvent) -> None:
        prop_id = self._held.pop(event.hand, None)
        if prop_id is None:
            raise RecordingError(f"release with empty {event.hand} hand")
        effect = next(
            e
            for e in self.slot.effects
            if e.type == RIGID_TRANSFORM and e.target_id == prop_id
        )
        write_release_keyframes(self.project, effect, self.slot.start, frame)


def write_grab_keyframes(
    project, effect: EffectInstance, frame: int, char_id: str, anchor: str
) -> None:
    """Attach the effect's target to a character anchor at `frame`, keeping
    the target's current world pose (the local offset absorbs the gap)."""
    joint = CHARACTER_ANCHORS.get(anchor)
    if joint is None:
        raise UnknownAnchor(f"unknown anchor {anchor!r}")
    state = state_at(project, frame, naive=True)
    char_snap = state.objects.get(char_id)
    if char_snap is None:
        raise UnknownTarget(f"no character {char_id!r}")
    prop_snap = state.objects.get(effect.target_id)
    if prop_snap is None:
        raise UnknownTarget(f"no prop {effect.target_id!r}")
    anchor_world = Transform(
        position=char_snap.joint_world(joint), rotation=char_snap.transform.rotation
    )
    local = t_relative(anchor_world, prop_snap.transform)
    effect.channel("attachment").set_sample(frame, (char_id, anchor, local))


def write_release_keyframes(
    project, effect: EffectInstance, slot_start: int, frame: int
) -> None:
    """Freeze the effect's target at its carried world pose and detach.

    Poses are evaluated while still attached; keyframes land at frame - 1
    (when inside the slot) and frame, then the attachment ends at frame.
    """
    state_now = state_at(project, frame, naive=True)
    world_now = state_now.objects[effect.target_id].transform
    if frame - 1 >= slot_start:
        state_prev = state_at(project, frame - 1, naive=True)
        world_prev = state_prev.objects[effect.target_id].transform
        for name, value in zip(
            ("position.x", "position.y", "position.z"), world_prev.position
        ):
            effect.channel(name).set_sample(frame - 1, value)
        effect.channel("rotation").set_sample(frame - 1, world_prev.rotation)
    for name, value in zip(
        ("position.x", "position.y", "position.z"), world_now.position
    ):
        effect.channel(name).set_sample(frame, value)
    effect.channel("rotation").set_sample(frame, world_now.rotation)
    effect.channel("attachment").set_sample(frame, None)


def _writable_names(effect: EffectInstance) -> tuple[str, ...]:
    from .effects import EFFECT_TYPES

    return EFFECT_TYPES[effect.type].writable
