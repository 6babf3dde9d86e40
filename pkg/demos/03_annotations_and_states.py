"""
Annotation overlays, interactive states, and the project container
==================================================================

Fire and FloatingArrows do not move anything; they decorate their
target while their slot is active, and the decoration shows up in
resolved states and trace rows. InteractiveState drives a declared
state machine. Everything survives a save/load round trip, and the
container bytes are canonical: saving twice yields identical bytes.
"""

from reenact import ControllableObject, ObjectClass, Project, Scene, Timeline, Transform
from reenact.persistence import load_project, save_project, write_trace
from reenact.playback import export_trace, state_at

project = Project(scene=Scene(), timeline=Timeline(), frame_rate=30)
project.scene.register_object(
    ControllableObject(
        id="stove",
        name="Stove",
        cls=ObjectClass.PROP,
        initial=Transform(position=(4.0, 0.0, 2.0)),
        triggerable=True,
        states=("off", "lit"),
        initial_state="off",
    )
)
project.scene.register_object(
    ControllableObject(
        id="exit_sign",
        name="Exit sign",
        cls=ObjectClass.MARKER,
        initial=Transform(position=(9.0, 2.2, 0.0)),
    )
)

track = project.create_track(name="hazards")

# the stove ignites at frame 10 and burns while the slot is live
burn = project.create_slot(track.id, 10, 50)
project.attach_effect(
    burn.id, "Fire", "stove", params={"explosion_type": "burst"}
)
state_fx = project.attach_effect(burn.id, "InteractiveState", "stove")
state_fx.channel("state").set_sample(10, "lit")

# arrows hover over the stove and point toward the exit sign
guide = project.create_track(name="guidance")
arrows = project.create_slot(guide.id, 0, 60)
project.attach_effect(
    arrows.id, "FloatingArrows", "stove", params={"dest": "exit_sign"}
)
project.bump()

for frame in (0, 10, 30, 55, 60):
    st = state_at(project, frame)
    stove = st.objects["stove"]
    kinds = sorted(d.kind for d in stove.decorations)
    print(f"frame {frame:2d}: stove state={stove.state:4s} decorations={kinds or '-'}")

# decorations carry their payload too: the arrow knows both endpoints
arrow = next(d for d in state_at(project, 10).objects["stove"].decorations if d.kind == "arrow")
print("arrow detail:", dict(arrow.detail)["from"], "->", dict(arrow.detail)["to"])

# decorations ride along in the trace column
rows = write_trace(export_trace(project, 30, 30)).decode().splitlines()
print("trace @30:", rows[1], "|", rows[2])

# --- canonical container ------------------------------------------------------

blob = save_project(project)
again = save_project(load_project(blob))
print("container bytes:", len(blob), "| canonical round trip:", blob == again)
