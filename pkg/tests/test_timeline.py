"""Track container structural rules, including failure atomicity."""

import random

import pytest

from reenact.errors import (
    DuplicateEffectTarget,
    IncompatibleTarget,
    IndexOutOfRange,
    InvalidInterval,
    LockedTrack,
    OverlapRejected,
    UnknownSlot,
    UnknownTrack,
)
from reenact.mathx import Transform
from reenact.project import Project
from reenact.scene import ControllableObject, ObjectClass


def make_project() -> Project:
    p = Project()
    p.register_object(ControllableObject("hero", "Hero", ObjectClass.CHARACTER))
    p.register_object(ControllableObject("knife", "Knife", ObjectClass.PROP))
    p.register_object(
        ControllableObject(
            "door",
            "Door",
            ObjectClass.PROP,
            triggerable=True,
            states=("closed", "open"),
        )
    )
    return p


def canon(project: Project):
    """Deep value snapshot of the container, for atomicity checks."""
    out = []
    for track in project.timeline.tracks:
        slots = []
        for slot in track.slots:
            effects = tuple(
                (e.id, e.type, e.target_id, tuple(sorted(e.params.items())))
                for e in slot.effects
            )
            slots.append((slot.id, slot.start, slot.end, effects))
        out.append((track.id, track.name, track.muted, track.locked, tuple(slots)))
    return tuple(out)


# --- tracks ---------------------------------------------------------------


def test_create_track_auto_name_and_position():
    p = make_project()
    a = p.create_track()
    b = p.create_track()
    assert a.name == "Track 1"
    assert b.name == "Track 2"
    c = p.create_track("front", position=0)
    assert [t.id for t in p.timeline.tracks] == [c.id, a.id, b.id]


def test_create_track_position_out_of_range():
    p = make_project()
    p.create_track()
    with pytest.raises(IndexOutOfRange):
        p.create_track("x", position=5)
    assert len(p.timeline.tracks) == 1


def test_reorder_track_moves_and_validates():
    p = make_project()
    a, b, c = p.create_track("a"), p.create_track("b"), p.create_track("c")
    p.reorder_track(c.id, 0)
    assert [t.id for t in p.timeline.tracks] == [c.id, a.id, b.id]
    with pytest.raises(IndexOutOfRange):
        p.reorder_track(a.id, 3)
    with pytest.raises(UnknownTrack):
        p.reorder_track("nope", 0)


def test_delete_track_removes_slots_and_effects():
    p = make_project()
    t = p.create_track()
    s = p.create_slot(t.id, 0, 10)
    p.attach_effect(s.id, "RigidTransform", "knife")
    p.delete_track(t.id)
    assert p.timeline.tracks == []
    with pytest.raises(UnknownSlot):
        p.timeline.find_slot(s.id)


# --- slots ------------------------------------------------------------------


def test_slot_intervals_are_inclusive_and_adjacency_is_legal():
    p = make_project()
    t = p.create_track()
    p.create_slot(t.id, 0, 10)
    p.create_slot(t.id, 11, 20)  # touching is fine
    with pytest.raises(OverlapRejected):
        p.create_slot(t.id, 20, 25)  # shares frame 20
    with pytest.raises(OverlapRejected):
        p.create_slot(t.id, 5, 7)  # nested
    assert [s.start for s in p.timeline.track(t.id).slots] == [0, 11]


def test_slot_interval_validation():
    p = make_project()
    t = p.create_track()
    with pytest.raises(InvalidInterval):
        p.create_slot(t.id, 5, 4)
    with pytest.raises(InvalidInterval):
        p.create_slot(t.id, -1, 4)
    s = p.create_slot(t.id, 0, 0)  # single-frame slot is legal
    assert s.start == s.end == 0


def test_move_slot_across_tracks_keeps_length_and_effects():
    p = make_project()
    a, b = p.create_track("a"), p.create_track("b")
    s = p.create_slot(a.id, 5, 15)
    e = p.attach_effect(s.id, "RigidTransform", "knife")
    p.move_slot(s.id, b.id, 100)
    track, slot = p.timeline.find_slot(s.id)
    assert track.id == b.id
    assert (slot.start, slot.end) == (100, 110)
    assert slot.effects[0].id == e.id
    assert p.timeline.track(a.id).slots == []


def test_move_slot_failure_is_atomic():
    p = make_project()
    a, b = p.create_track("a"), p.create_track("b")
    s = p.create_slot(a.id, 0, 10)
    p.create_slot(b.id, 50, 60)
    before = canon(p)
    with pytest.raises(OverlapRejected):
        p.move_slot(s.id, b.id, 55)
    assert canon(p) == before


def test_move_slot_within_same_track_ignores_itself():
    p = make_project()
    t = p.create_track()
    s = p.create_slot(t.id, 0, 10)
    p.move_slot(s.id, t.id, 3)
    _, slot = p.timeline.find_slot(s.id)
    assert (slot.start, slot.end) == (3, 13)


def test_trim_slot_and_overlap_rejection():
    p = make_project()
    t = p.create_track()
    s1 = p.create_slot(t.id, 0, 10)
    p.create_slot(t.id, 20, 30)
    p.trim_slot(s1.id, new_end=19)
    _, slot = p.timeline.find_slot(s1.id)
    assert slot.end == 19
    before = canon(p)
    with pytest.raises(OverlapRejected):
        p.trim_slot(s1.id, new_end=20)
    assert canon(p) == before
    with pytest.raises(InvalidInterval):
        p.trim_slot(s1.id, new_start=25)  # start would pass end


def test_delete_slot():
    p = make_project()
    t = p.create_track()
    s = p.create_slot(t.id, 0, 10)
    p.delete_slot(s.id)
    assert p.timeline.track(t.id).slots == []
    with pytest.raises(UnknownSlot):
        p.delete_slot(s.id)


# --- locking -----------------------------------------------------------------


def test_locked_track_rejects_every_mutation_bit_identically():
    p = make_project()
    t = p.create_track()
    s = p.create_slot(t.id, 0, 10)
    e = p.attach_effect(s.id, "RigidTransform", "knife")
    other = p.create_track("other")
    p.set_track_flags(t.id, locked=True)
    before = canon(p)
    for op in (
        lambda: p.create_slot(t.id, 20, 30),
        lambda: p.delete_slot(s.id),
        lambda: p.trim_slot(s.id, new_end=5),
        lambda: p.move_slot(s.id, other.id, 0),
        lambda: p.attach_effect(s.id, "RigidTransform", "hero"),
        lambda: p.detach_effect(e.id),
        lambda: p.delete_track(t.id),
        lambda: p.reorder_track(t.id, 1),
    ):
        with pytest.raises(LockedTrack):
            op()
        assert canon(p) == before
    # unlocking must stay possible
    p.set_track_flags(t.id, locked=False)
    p.delete_slot(s.id)


def test_move_slot_into_locked_destination_rejected():
    p = make_project()
    a, b = p.create_track("a"), p.create_track("b")
    s = p.create_slot(a.id, 0, 10)
    p.set_track_flags(b.id, locked=True)
    with pytest.raises(LockedTrack):
        p.move_slot(s.id, b.id, 0)


def test_mute_flag_roundtrip():
    p = make_project()
    t = p.create_track()
    p.set_track_flags(t.id, muted=True)
    assert p.timeline.track(t.id).muted
    p.set_track_flags(t.id, muted=False)
    assert not p.timeline.track(t.id).muted


# --- effects ------------------------------------------------------------------


def test_duplicate_effect_target_rule():
    p = make_project()
    t = p.create_track()
    s = p.create_slot(t.id, 0, 10)
    p.attach_effect(s.id, "RigidTransform", "knife")
    p.attach_effect(s.id, "RigidTransform", "hero")  # same type, other target: fine
    with pytest.raises(DuplicateEffectTarget) as err:
        p.attach_effect(s.id, "RigidTransform", "knife")
    assert err.value.existing_effect is not None
    # a second slot may repeat the pair
    s2 = p.create_slot(t.id, 11, 20)
    p.attach_effect(s2.id, "RigidTransform", "knife")


def test_detach_effect():
    p = make_project()
    t = p.create_track()
    s = p.create_slot(t.id, 0, 10)
    e = p.attach_effect(s.id, "InteractiveState", "door")
    p.detach_effect(e.id)
    assert p.timeline.track(t.id).slots[0].effects == []


def test_set_effect_params_merges_and_revalidates():
    p = make_project()
    t = p.create_track()
    s = p.create_slot(t.id, 0, 10)
    e = p.attach_effect(s.id, "Fire", "door", params={"explosion_type": "burst"})
    before = p.revision

    p.set_effect_params(e.id, {"firewall_type": "ring"})
    # untouched keys survive the merge
    assert e.params["explosion_type"] == "burst"
    assert e.params["firewall_type"] == "ring"
    assert p.revision > before

    from reenact.errors import InvalidParam

    with pytest.raises(InvalidParam):
        p.set_effect_params(e.id, {"explosion_type": "huge"})
    with pytest.raises(InvalidParam):
        p.set_effect_params(e.id, {"no_such_knob": 1})
    assert e.params["explosion_type"] == "burst"  # rejected edits change nothing

    p.set_track_flags(t.id, locked=True)
    with pytest.raises(LockedTrack):
        p.set_effect_params(e.id, {"firewall_type": "line"})


def test_duration_is_max_slot_end():
    p = make_project()
    assert p.duration == 0
    a = p.create_track()
    b = p.create_track()
    p.create_slot(a.id, 0, 10)
    p.create_slot(b.id, 40, 90)
    assert p.duration == 90


# --- randomized constraint suite (small; the big one is acceptance) -----------


def run_random_ops(seed: int, ops: int) -> None:
    rng = random.Random(seed)
    p = make_project()
    targets = ["hero", "knife", "door"]
    types = ["RigidTransform", "InteractiveState", "FloatingArrows", "Fire"]
    for _ in range(ops):
        tracks = p.timeline.tracks
        slots = [(t, s) for t in tracks for s in t.slots]
        choice = rng.random()
        before = canon(p)
        try:
            if choice < 0.15 or not tracks:
                p.create_track(position=rng.randint(0, len(tracks)) if tracks else None)
            elif choice < 0.4:
                t = rng.choice(tracks)
                start = rng.randint(0, 200)
                p.create_slot(t.id, start, start + rng.randint(0, 50))
            elif choice < 0.5 and slots:
                t, s = rng.choice(slots)
                p.trim_slot(
                    s.id,
                    new_start=max(0, s.start + rng.randint(-10, 10)),
                    new_end=max(0, s.end + rng.randint(-10, 10)),
                )
            elif choice < 0.6 and slots:
                _, s = rng.choice(slots)
                p.move_slot(s.id, rng.choice(tracks).id, rng.randint(0, 200))
            elif choice < 0.75 and slots:
                _, s = rng.choice(slots)
                etype = rng.choice(types)
                target = rng.choice(targets)
                params = {"dest": rng.choice(targets)} if etype == "FloatingArrows" else None
                p.attach_effect(s.id, etype, target, params)
            elif choice < 0.8 and tracks:
                p.set_track_flags(rng.choice(tracks).id, locked=rng.random() < 0.3)
            elif choice < 0.85 and tracks:
                p.set_track_flags(rng.choice(tracks).id, muted=rng.random() < 0.5)
            elif choice < 0.9 and tracks:
                p.reorder_track(rng.choice(tracks).id, rng.randint(0, len(tracks) - 1))
            elif choice < 0.95 and slots:
                _, s = rng.choice(slots)
                p.delete_slot(s.id)
            elif tracks:
                p.delete_track(rng.choice(tracks).id)
        except (
            OverlapRejected,
            LockedTrack,
            InvalidInterval,
            IndexOutOfRange,
            DuplicateEffectTarget,
            IncompatibleTarget,
        ):
            assert canon(p) == before, "rejected op must not mutate"
        check_invariants(p)


def check_invariants(p: Project) -> None:
    for track in p.timeline.tracks:
        starts = [s.start for s in track.slots]
        assert starts == sorted(starts), "slots out of order"
        for i in range(len(track.slots) - 1):
            assert track.slots[i].end < track.slots[i + 1].start, "slots overlap"
        for slot in track.slots:
            assert 0 <= slot.start <= slot.end
            pairs = [(e.type, e.target_id) for e in slot.effects]
            assert len(pairs) == len(set(pairs)), "duplicate type/target pair"
    assert p.validate() == []


def test_random_ops_keep_invariants():
    for seed in (101, 202, 303):
        run_random_ops(seed, 400)
