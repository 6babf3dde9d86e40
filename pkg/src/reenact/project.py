"""Project aggregate: one scene + one timeline + a frame rate.

All mutations route through this façade so the playback cache can be
invalidated by a revision bump. Reads never change the revision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .effects import (
    EFFECT_TYPES,
    ENC_ABSOLUTE,
    ENC_DELTA,
    FLOATING_ARROWS,
    EffectInstance,
    channel_kind,
    KIND_ATTACH,
    KIND_QUAT,
    KIND_STATE,
)
from .errors import InvalidParam
from .mathx import q_is_unit
from .scene import CHARACTER_ANCHORS, ControllableObject, ObjectClass, Scene
from .timeline import Slot, Timeline, Track

DEFAULT_FRAME_RATE = 30


@dataclass
class Project:
    scene: Scene = field(default_factory=Scene)
    timeline: Timeline = field(default_factory=Timeline)
    frame_rate: int = DEFAULT_FRAME_RATE
    revision: int = 0
    cache: Any = None  # playback checkpoint cache, owned by reenact.playback

    def bump(self) -> None:
        self.revision += 1
        self.cache = None

    @property
    def duration(self) -> int:
        return self.timeline.duration

    # -- scene mutations --

    def register_object(self, obj: ControllableObject) -> ControllableObject:
        out = self.scene.register_object(obj)
        self.bump()
        return out

    def attach_object(self, child_id: str, parent_id: str, anchor: str) -> None:
        self.scene.attach_object(child_id, parent_id, anchor)
        self.bump()

    def detach_object(self, child_id: str) -> None:
        self.scene.detach_object(child_id)
        self.bump()

    # -- timeline mutations --

    def create_track(self, name: str = "", position: int | None = None) -> Track:
        out = self.timeline.create_track(name, position)
        self.bump()
        return out

    def reorder_track(self, track_id: str, new_index: int) -> None:
        self.timeline.reorder_track(track_id, new_index)
        self.bump()

    def set_track_flags(
        self, track_id: str, muted: bool | None = None, locked: bool | None = None
    ) -> Track:
        out = self.timeline.set_track_flags(track_id, muted=muted, locked=locked)
        self.bump()
        return out

    def delete_track(self, track_id: str) -> None:
        self.timeline.delete_track(track_id)
        self.bump()

    def create_slot(self, track_id: str, start: int, end: int) -> Slot:
        out = self.timeline.create_slot(track_id, start, end)
        self.bump()
        return out

    def delete_slot(self, slot_id: str) -> None:
        self.timeline.delete_slot(slot_id)
        self.bump()

    def move_slot(self, slot_id: str, dest_track_id: str, new_start: int) -> Slot:
        out = self.timeline.move_slot(slot_id, dest_track_id, new_start)
        self.bump()
        return out

    def trim_slot(
        self, slot_id: str, new_start: int | None = None, new_end: int | None = None
    ) -> Slot:
        out = self.timeline.trim_slot(slot_id, new_start, new_end)
        self.bump()
        return out

    def attach_effect(
        self,
        slot_id: str,
        effect_type: str,
        target_id: str,
        params: dict[str, object] | None = None,
    ) -> EffectInstance:
        clean = dict(params or {})
        if effect_type == FLOATING_ARROWS and "dest" in clean:
            self.scene.get(clean["dest"])  # arrows must point at a real object
        out = self.timeline.attach_effect(self.scene, slot_id, effect_type, target_id, clean)
        self.bump()
        return out

    def detach_effect(self, effect_id: str) -> None:
        self.timeline.detach_effect(effect_id)
        self.bump()

    def set_effect_params(
        self, effect_id: str, params: dict[str, object]
    ) -> EffectInstance:
        clean = dict(params)
        _track, _slot, effect = self.timeline.find_effect(effect_id)
        if effect.type == FLOATING_ARROWS and "dest" in clean:
            self.scene.get(clean["dest"])  # arrows must point at a real object
        out = self.timeline.set_effect_params(effect_id, clean)
        self.bump()
        return out

    # -- integrity ---------------------------------------------------------

    def validate(self) -> list[str]:
        """Every structural invariant, re-checked from scratch.

        Returns human-readable violation strings prefixed with a stable code;
        an empty list means the project is internally consistent.
        """
        out: list[str] = []
        seen_tracks: set[str] = set()
        for track in self.timeline.tracks:
            if track.id in seen_tracks:
                out.append(f"DuplicateId: track id {track.id!r} repeats")
            seen_tracks.add(track.id)
            prev_end: int | None = None
            prev_sorted = True
            for slot in track.slots:
                if slot.start < 0 or slot.end < slot.start:
                    out.append(
                        f"InvalidInterval: slot {slot.id!r} has [{slot.start}, {slot.end}]"
                    )
                if prev_end is not None and slot.start <= prev_end:
                    out.append(
                        f"OverlapRejected: slots overlap on track {track.id!r} "
                        f"near slot {slot.id!r} (Constraint 3)"
                    )
                    prev_sorted = False
                prev_end = max(prev_end, slot.end) if prev_end is not None else slot.end
                out.extend(self._validate_slot(track, slot))
            if not prev_sorted:
                pass  # already reported
        out.extend(self._validate_scene())
        return out

    def _validate_slot(self, track: Track, slot: Slot) -> list[str]:
        out: list[str] = []
        pairs: set[tuple[str, str]] = set()
        for effect in slot.effects:
            key = (effect.type, effect.target_id)
            if key in pairs:
                out.append(
                    f"DuplicateEffectTarget: slot {slot.id!r} repeats "
                    f"{effect.type} on {effect.target_id!r} (Constraint 2)"
                )
            pairs.add(key)
            if effect.type not in EFFECT_TYPES:
                out.append(f"UnknownEffect: {effect.id!r} has type {effect.type!r}")
                continue
            if effect.target_id not in self.scene.objects:
                out.append(
                    f"UnknownTarget: effect {effect.id!r} targets {effect.target_id!r}"
                )
            if effect.type == FLOATING_ARROWS:
                dest = effect.params.get("dest")
                if dest not in self.scene.objects:
                    out.append(
                        f"UnknownTarget: effect {effect.id!r} arrow dest {dest!r}"
                    )
            out.extend(self._validate_channels(effect))
        return out

    def _validate_channels(self, effect: EffectInstance) -> list[str]:
        out: list[str] = []
        spec = EFFECT_TYPES.get(effect.type)
        for name, chan in effect.channels.items():
            if spec is not None and name not in spec.writable:
                out.append(f"InvalidParam: {effect.id!r} writes foreign channel {name!r}")
                continue
            try:
                kind = channel_kind(name)
            except InvalidParam:
                out.append(f"InvalidParam: {effect.id!r} has unknown channel {name!r}")
                continue
            if chan.encoding not in (ENC_ABSOLUTE, ENC_DELTA):
                out.append(f"InvalidParam: channel {name!r} encoding {chan.encoding!r}")
            prev = None
            for frame, value in chan.samples:
                if frame < 0:
                    out.append(f"InvalidInterval: {effect.id!r}.{name} sample at {frame}")
                if prev is not None and frame <= prev:
                    out.append(
                        f"InvalidInterval: {effect.id!r}.{name} frames not increasing"
                    )
                prev = frame
                if kind == KIND_QUAT and chan.encoding == ENC_ABSOLUTE:
                    if not q_is_unit(value):
                        out.append(
                            f"InvalidParam: {effect.id!r}.{name} non-unit rotation "
                            f"at frame {frame}"
                        )
                if kind == KIND_STATE:
                    target = self.scene.objects.get(effect.target_id)
                    if target is not None and value not in target.states:
                        out.append(
                            f"InvalidState: {effect.id!r} event {value!r} not declared "
                            f"on {effect.target_id!r}"
                        )
                if kind == KIND_ATTACH and value is not None:
                    parent_id, anchor, _local = value
                    parent = self.scene.objects.get(parent_id)
                    if parent is None:
                        out.append(
                            f"UnknownTarget: {effect.id!r} attaches to {parent_id!r}"
                        )
                    elif anchor not in parent.anchor_names():
                        out.append(
                            f"UnknownAnchor: {effect.id!r} uses {parent_id!r}.{anchor!r}"
                        )
        return out

    def _validate_scene(self) -> list[str]:
        out: list[str] = []
        for obj in self.scene.objects.values():
            if obj.attachment is not None:
                parent_id, anchor = obj.attachment
                parent = self.scene.objects.get(parent_id)
                if parent is None:
                    out.append(f"UnknownTarget: {obj.id!r} attached to {parent_id!r}")
                    continue
                if anchor not in parent.anchor_names():
                    out.append(f"UnknownAnchor: {obj.id!r} uses {parent_id!r}.{anchor!r}")
            if obj.cls is ObjectClass.CHARACTER:
                missing = [a for a in CHARACTER_ANCHORS if a not in obj.anchor_names()]
                if missing:
                    out.append(f"UnknownAnchor: character {obj.id!r} lacks {missing}")
        # static attachment cycles
        for obj in self.scene.objects.values():
            seen = set()
            cursor: str | None = obj.id
            while cursor is not None:
                if cursor in seen:
                    out.append(f"CycleRejected: attachment loop through {obj.id!r}")
                    break
                seen.add(cursor)
                node = self.scene.objects.get(cursor)
                if node is None or node.attachment is None:
                    break
                cursor = node.attachment[0]
        return out
