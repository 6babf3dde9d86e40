"""Track container: ordered tracks holding non-overlapping effect slots.

Structural rules enforced here:

1. A lower track index means higher priority; when two effects write the
   same attribute of the same object on a frame, the higher-priority track's
   write wins (applied by the playback resolver, declared here).
2. A slot may hold the same effect type more than once only when the
   instances target different objects.
3. Slots within one track never overlap; intervals are inclusive, so
   [a, b] and [b + 1, c] touch but are legal.

Every rejected operation leaves the container untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .effects import (
    EFFECT_TYPES,
    EffectInstance,
    capture_from_object,
    check_target,
    validate_params,
)
from .errors import (
    DuplicateEffectTarget,
    IndexOutOfRange,
    InvalidInterval,
    LockedTrack,
    OverlapRejected,
    UnknownEffect,
    UnknownSlot,
    UnknownTrack,
)
from .scene import Scene


@dataclass
class Slot:
    id: str
    start: int
    end: int
    effects: list[EffectInstance] = field(default_factory=list)

    def contains(self, frame: int) -> bool:
        return self.start <= frame <= self.end

    def overlaps(self, start: int, end: int) -> bool:
        return self.start <= end and start <= self.end


@dataclass
class Track:
    id: str
    name: str
    slots: list[Slot] = field(default_factory=list)
    muted: bool = False
    locked: bool = False


def _check_interval(start: int, end: int) -> None:
    if start < 0 or end < 0 or end < start:
        raise InvalidInterval(f"bad interval [{start}, {end}]")


class Timeline:
    """The track container. Track list order is priority order (0 = highest)."""

    def __init__(self) -> None:
        self.tracks: list[Track] = []
        self._next_id = 1

    # -- id allocation (deterministic; persisted projects restore the counter) --

    def _allocate(self, prefix: str) -> str:
        out = f"{prefix}{self._next_id}"
        self._next_id += 1
        return out

    def restore_id_counter(self) -> None:
        top = 0
        for track in self.tracks:
            ids = [track.id] + [s.id for s in track.slots]
            for slot in track.slots:
                ids.extend(e.id for e in slot.effects)
            for raw in ids:
                digits = "".join(ch for ch in raw if ch.isdigit())
                if digits:
                    top = max(top, int(digits))
        self._next_id = top + 1

    # -- lookups --

    def track(self, track_id: str) -> Track:
        for track in self.tracks:
            if track.id == track_id:
                return track
        raise UnknownTrack(f"no track {track_id!r}")

    def track_index(self, track_id: str) -> int:
        for i, track in enumerate(self.tracks):
            if track.id == track_id:
                return i
        raise UnknownTrack(f"no track {track_id!r}")

    def find_slot(self, slot_id: str) -> tuple[Track, Slot]:
        for track in self.tracks:
            for slot in track.slots:
                if slot.id == slot_id:
                    return track, slot
        raise UnknownSlot(f"no slot {slot_id!r}")

    def find_effect(self, effect_id: str) -> tuple[Track, Slot, EffectInstance]:
        for track in self.tracks:
            for slot in track.slots:
                for effect in slot.effects:
                    if effect.id == effect_id:
                        return track, slot, effect
        raise UnknownEffect(f"no effect {effect_id!r}")

    def slot_at(self, track: Track, frame: int) -> Slot | None:
        for slot in track.slots:
            if slot.contains(frame):
                return slot
            if slot.start > frame:
                break
        return None

    @property
    def duration(self) -> int:
        """Largest slot end across all tracks; 0 when the timeline is empty."""
        ends = [s.end for t in self.tracks for s in t.slots]
        return max(ends) if ends else 0

    # -- track ops --

    def create_track(self, name: str = "", position: int | None = None) -> Track:
        if position is None:
            position = len(self.tracks)
        if not (0 <= position <= len(self.tracks)):
            raise IndexOutOfRange(
                f"position {position} out of range 0..{len(self.tracks)}"
            )
        track = Track(id=self._allocate("t"), name=name or f"Track {len(self.tracks) + 1}")
        self.tracks.insert(position, track)
        return track

    def reorder_track(self, track_id: str, new_index: int) -> None:
        i = self.track_index(track_id)
        track = self.tracks[i]
        if track.locked:
            raise LockedTrack(f"track {track_id!r} is locked")
        if not (0 <= new_index < len(self.tracks)):
            raise IndexOutOfRange(
                f"index {new_index} out of range 0..{len(self.tracks) - 1}"
            )
        self.tracks.pop(i)
        self.tracks.insert(new_index, track)

    def set_track_flags(
        self, track_id: str, muted: bool | None = None, locked: bool | None = None
    ) -> Track:
        # the one mutation allowed on a locked track, otherwise unlock would be impossible
        track = self.track(track_id)
        if muted is not None:
            track.muted = muted
        if locked is not None:
            track.locked = locked
        return track

    def delete_track(self, track_id: str) -> None:
        i = self.track_index(track_id)
        if self.tracks[i].locked:
            raise LockedTrack(f"track {track_id!r} is locked")
        self.tracks.pop(i)

    # -- slot ops --

    def _reject_overlap(
        self, track: Track, start: int, end: int, ignore: str | None = None
    ) -> None:
        for slot in track.slots:
            if slot.id != ignore and slot.overlaps(start, end):
                raise OverlapRejected(
                    f"interval [{start}, {end}] overlaps slot {slot.id!r} "
                    f"[{slot.start}, {slot.end}] (Constraint 3: slots on one "
                    "track may touch but never share a frame)",
                    conflicting_slot=slot.id,
                )

    def _insert_slot(self, track: Track, slot: Slot) -> None:
        track.slots.append(slot)
        track.slots.sort(key=lambda s: s.start)

    def create_slot(self, track_id: str, start: int, end: int) -> Slot:
        track = self.track(track_id)
        if track.locked:
            raise LockedTrack(f"track {track_id!r} is locked")
        _check_interval(start, end)
        self._reject_overlap(track, start, end)
        slot = Slot(id=self._allocate("s"), start=start, end=end)
        self._insert_slot(track, slot)
        return slot

    def delete_slot(self, slot_id: str) -> None:
        track, slot = self.find_slot(slot_id)
        if track.locked:
            raise LockedTrack(f"track {track.id!r} is locked")
        track.slots.remove(slot)

    def move_slot(self, slot_id: str, dest_track_id: str, new_start: int) -> Slot:
        """Relocate a slot (length preserved, effects ride along). Atomic."""
        src_track, slot = self.find_slot(slot_id)
        dest_track = self.track(dest_track_id)
        if src_track.locked:
            raise LockedTrack(f"track {src_track.id!r} is locked")
        if dest_track.locked:
            raise LockedTrack(f"track {dest_track.id!r} is locked")
        length = slot.end - slot.start
        _check_interval(new_start, new_start + length)
        ignore = slot.id if dest_track is src_track else None
        self._reject_overlap(dest_track, new_start, new_start + length, ignore=ignore)
        src_track.slots.remove(slot)
        slot.start, slot.end = new_start, new_start + length
        self._insert_slot(dest_track, slot)
        return slot

    def trim_slot(
        self, slot_id: str, new_start: int | None = None, new_end: int | None = None
    ) -> Slot:
        track, slot = self.find_slot(slot_id)
        if track.locked:
            raise LockedTrack(f"track {track.id!r} is locked")
        start = slot.start if new_start is None else new_start
        end = slot.end if new_end is None else new_end
        _check_interval(start, end)
        self._reject_overlap(track, start, end, ignore=slot.id)
        slot.start, slot.end = start, end
        track.slots.sort(key=lambda s: s.start)
        return slot

    # -- effect ops --

    def attach_effect(
        self,
        scene: Scene,
        slot_id: str,
        effect_type: str,
        target_id: str,
        params: dict[str, object] | None = None,
    ) -> EffectInstance:
        track, slot = self.find_slot(slot_id)
        if track.locked:
            raise LockedTrack(f"track {track.id!r} is locked")
        if effect_type not in EFFECT_TYPES:
            raise UnknownEffect(f"unknown effect type {effect_type!r}")
        target = scene.get(target_id)
        check_target(effect_type, target)
        clean = validate_params(effect_type, dict(params or {}))
        for existing in slot.effects:
            if existing.type == effect_type and existing.target_id == target_id:
                raise DuplicateEffectTarget(
                    f"slot {slot_id!r} already has {effect_type} on {target_id!r} "
                    "(Constraint 2: same type twice needs different targets)",
                    existing_effect=existing.id,
                )
        effect = EffectInstance(
            id=self._allocate("e"),
            type=effect_type,
            target_id=target_id,
            params=clean,
            captured_initial=capture_from_object(target),
        )
        slot.effects.append(effect)
        return effect

    def detach_effect(self, effect_id: str) -> None:
        track, slot, effect = self.find_effect(effect_id)
        if track.locked:
            raise LockedTrack(f"track {track.id!r} is locked")
        slot.effects.remove(effect)

    def set_effect_params(
        self, effect_id: str, params: dict[str, object]
    ) -> EffectInstance:
        """Merge parameter updates into an effect, re-validating the full set."""
        track, _slot, effect = self.find_effect(effect_id)
        if track.locked:
            raise LockedTrack(f"track {track.id!r} is locked")
        merged = dict(effect.params)
        merged.update(params)
        effect.params = validate_params(effect.type, merged)
        return effect
