"""
Ballistic hand-off
==================

A RigidTransform with physics enabled keyframes the approach, then
stops keying position. From the last keyed frame the evaluator hands
the object to closed-form ballistics: it keeps the hand-off velocity
and falls under gravity until the floor stops it. Because the motion
is evaluated closed-form in time rather than integrated step by step,
replaying any frame gives the same answer to the last bit.
"""

import math

from reenact import ControllableObject, ObjectClass, Project, Scene, Timeline, Transform
from reenact.playback import state_at

GRAVITY = 9.81
RATE = 60

project = Project(scene=Scene(), timeline=Timeline(), frame_rate=RATE)
project.scene.register_object(
    ControllableObject(
        id="mug",
        name="Mug",
        cls=ObjectClass.PROP,
        initial=Transform(position=(0.0, 0.9, 0.0)),
    )
)

track = project.create_track(name="knocked off the table")
slot = project.create_slot(track.id, 0, 120)
effect = project.attach_effect(slot.id, "RigidTransform", "mug", params={"physics": True})

# keyed shove: 0.5 m of sideways travel over a sixth of a second
x = effect.channel("position.x")
y = effect.channel("position.y")
for frame in range(0, 11):
    x.set_sample(frame, 0.05 * frame)
    y.set_sample(frame, 0.9)
project.bump()

# hand-off state at the last keyed frame
vx = 0.05 * RATE
print(f"hand-off at frame 10: x=0.50 y=0.90, carrying vx={vx:.1f} m/s")

print(f"{'frame':>5} {'t(s)':>6} {'x':>7} {'y':>7} {'closed form y':>13}")
for frame in (10, 20, 30, 40, 50, 120):
    px, py, _ = state_at(project, frame).position("mug")
    t = (frame - 10) / RATE
    expect = max(0.0, 0.9 - 0.5 * GRAVITY * t * t)
    flag = "" if math.isclose(py, expect, abs_tol=1e-9) else "  <- mismatch"
    print(f"{frame:5d} {t:6.3f} {px:7.3f} {py:7.3f} {expect:13.6f}{flag}")

# the floor clamps the fall; horizontal motion stops with it
ground_frame = next(
    f for f in range(10, 121) if state_at(project, f).position("mug")[1] < 1e-9
)
print("first frame on the floor:", ground_frame)
px, py, pz = state_at(project, 120).position("mug")
print(f"resting spot: ({px:.3f}, {py:.3f}, {pz:.3f})")
