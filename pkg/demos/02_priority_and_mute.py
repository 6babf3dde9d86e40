"""
Track priority, muting, and the constraint rulebook
===================================================

Two tracks fight over the same channel of the same prop. The track
with the lower index wins every contested frame; muting it promotes
the next track down, and the slot/effect rules reject bad edits with
messages that name the rule they enforce.
"""

from reenact import ControllableObject, ObjectClass, Project, Scene, Timeline, Transform
from reenact.errors import DuplicateEffectTarget, OverlapRejected
from reenact.playback import state_at

project = Project(scene=Scene(), timeline=Timeline(), frame_rate=30)
project.scene.register_object(
    ControllableObject(
        id="ball",
        name="Ball",
        cls=ObjectClass.PROP,
        initial=Transform(position=(0.0, 0.0, 0.0)),
    )
)


def keyed(track_name, x_value):
    """One slot [0, 20] writing a constant position.x."""
    track = project.create_track(name=track_name)
    slot = project.create_slot(track.id, 0, 20)
    effect = project.attach_effect(slot.id, "RigidTransform", "ball")
    effect.channel("position.x").set_sample(0, x_value)
    project.bump()
    return track


# track index 0 outranks track index 1
upper = keyed("upper", 1.0)
lower = keyed("lower", 2.0)

print("both unmuted:   x =", state_at(project, 10).position("ball")[0])

project.set_track_flags(upper.id, muted=True)
print("upper muted:    x =", state_at(project, 10).position("ball")[0])

project.set_track_flags(upper.id, muted=False)
project.reorder_track(upper.id, 1)
print("upper demoted:  x =", state_at(project, 10).position("ball")[0])

# --- rejections cite their constraint ----------------------------------------

try:
    project.create_slot(lower.id, 5, 12)
except OverlapRejected as exc:
    print("overlap:   ", exc)

slot = lower.slots[0]
try:
    project.attach_effect(slot.id, "RigidTransform", "ball")
except DuplicateEffectTarget as exc:
    print("duplicate: ", exc)

# touching end-to-start is legal; [start, end] is inclusive
project.create_slot(lower.id, 21, 40)
print("slots on lower track:", [(s.start, s.end) for s in lower.slots])
