"""Scene model: controllable objects, floor plan, visibility queries.

Coordinates are y-up. The floor plan lives on the ground plane, addressed as
(x, z) pairs; walls are vertical segments of effectively infinite height for
line-of-sight purposes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from .errors import (
    CycleRejected,
    DuplicateId,
    EmptyPath,
    GridMismatch,
    InvalidDescriptor,
    UnknownAnchor,
    UnknownTarget,
)
from .mathx import (
    QUAT_IDENTITY,
    Transform,
    Vec2,
    Vec3,
    point_segment_distance,
    polygon_is_simple,
    q_is_unit,
    seg_intersect,
)


class ObjectClass(enum.Enum):
    CHARACTER = "character"
    PROP = "prop"
    MARKER = "marker"
    NOTE = "note"
    PHOTO = "photo"
    CAMERA_PRESET = "camera_preset"
    ENVIRONMENT = "environment"


# Fixed skeleton addressed by pose channels. The character root transform is
# a separate channel and stands in for the pelvis, so it is not listed here.
JOINT_NAMES: tuple[str, ...] = (
    "head",
    "neck",
    "spine",
    "l_shoulder",
    "l_elbow",
    "l_wrist",
    "r_shoulder",
    "r_elbow",
    "r_wrist",
    "l_hip",
    "l_knee",
    "l_ankle",
    "r_hip",
    "r_knee",
    "r_ankle",
)

JOINT_INDEX: dict[str, int] = {name: i for i, name in enumerate(JOINT_NAMES)}

# Neutral standing pose, local to the character root (y up, facing +x).
DEFAULT_POSE: tuple[Vec3, ...] = (
    (0.0, 1.70, 0.0),  # head
    (0.0, 1.52, 0.0),  # neck
    (0.0, 1.25, 0.0),  # spine
    (0.0, 1.45, 0.20),  # l_shoulder
    (0.0, 1.15, 0.24),  # l_elbow
    (0.05, 0.88, 0.26),  # l_wrist
    (0.0, 1.45, -0.20),  # r_shoulder
    (0.0, 1.15, -0.24),  # r_elbow
    (0.05, 0.88, -0.26),  # r_wrist
    (0.0, 0.95, 0.10),  # l_hip
    (0.0, 0.50, 0.10),  # l_knee
    (0.0, 0.05, 0.10),  # l_ankle
    (0.0, 0.95, -0.10),  # r_hip
    (0.0, 0.50, -0.10),  # r_knee
    (0.0, 0.05, -0.10),  # r_ankle
)

CHARACTER_ANCHORS: dict[str, str] = {
    # anchor name -> joint the anchor rides on
    "left_hand": "l_wrist",
    "right_hand": "r_wrist",
}


@dataclass
class ControllableObject:
    """A registered scene entity the timeline can drive."""

    id: str
    name: str
    cls: ObjectClass
    initial: Transform = field(default_factory=Transform)
    triggerable: bool = False
    states: tuple[str, ...] = ()
    initial_state: str | None = None
    payload: str | None = None  # marker/note/photo text
    attachment: tuple[str, str] | None = None  # (parent id, anchor)

    def anchor_names(self) -> tuple[str, ...]:
        if self.cls is ObjectClass.CHARACTER:
            return tuple(CHARACTER_ANCHORS)
        return ()


@dataclass(frozen=True)
class Wall:
    a: Vec2
    b: Vec2


@dataclass(frozen=True)
class Region:
    name: str
    polygon: tuple[Vec2, ...]


@dataclass
class FloorPlan:
    walls: list[Wall] = field(default_factory=list)
    regions: list[Region] = field(default_factory=list)
    spawns: dict[str, Vec2] = field(default_factory=dict)

    def add_wall(self, a: Vec2, b: Vec2) -> Wall:
        if a == b:
            raise InvalidDescriptor("zero-length wall")
        wall = Wall(a, b)
        self.walls.append(wall)
        return wall

    def add_region(self, name: str, polygon: list[Vec2]) -> Region:
        if len(polygon) < 3:
            raise InvalidDescriptor(f"region {name!r} needs at least 3 vertices")
        if not polygon_is_simple(list(polygon)):
            raise InvalidDescriptor(f"region {name!r} polygon self-intersects")
        region = Region(name, tuple(polygon))
        self.regions.append(region)
        return region

    def add_spawn(self, name: str, point: Vec2) -> None:
        self.spawns[name] = point


class Scene:
    """Registry of controllable objects plus the floor plan."""

    def __init__(self) -> None:
        self.objects: dict[str, ControllableObject] = {}
        self.floor_plan = FloorPlan()

    def register_object(self, obj: ControllableObject) -> ControllableObject:
        if obj.id in self.objects:
            raise DuplicateId(f"object id {obj.id!r} already registered")
        _validate_descriptor(obj)
        self.objects[obj.id] = obj
        return obj

    def get(self, object_id: str) -> ControllableObject:
        try:
            return self.objects[object_id]
        except KeyError:
            raise UnknownTarget(f"no object {object_id!r}") from None

    def attach_object(self, child_id: str, parent_id: str, anchor: str) -> None:
        """Set the child's initial attachment; rejects cycles and bad anchors."""
        child = self.get(child_id)
        parent = self.get(parent_id)
        if anchor not in parent.anchor_names():
            raise UnknownAnchor(f"{parent_id!r} has no anchor {anchor!r}")
        seen = {child_id}
        cursor: str | None = parent_id
        while cursor is not None:
            if cursor in seen:
                raise CycleRejected(f"attaching {child_id!r} under {parent_id!r} loops")
            seen.add(cursor)
            nxt = self.objects[cursor].attachment
            cursor = nxt[0] if nxt else None
        child.attachment = (parent_id, anchor)

    def detach_object(self, child_id: str) -> None:
        self.get(child_id).attachment = None


def _validate_descriptor(obj: ControllableObject) -> None:
    if not obj.id:
        raise InvalidDescriptor("empty object id")
    if obj.triggerable:
        if not obj.states:
            raise InvalidDescriptor(f"{obj.id!r}: triggerable without states")
        if len(set(obj.states)) != len(obj.states):
            raise InvalidDescriptor(f"{obj.id!r}: duplicate state names")
        if obj.initial_state is None:
            obj.initial_state = obj.states[0]
        elif obj.initial_state not in obj.states:
            raise InvalidDescriptor(
                f"{obj.id!r}: initial state {obj.initial_state!r} not declared"
            )
    else:
        if obj.states or obj.initial_state is not None:
            raise InvalidDescriptor(f"{obj.id!r}: states declared without triggerable")
    if not q_is_unit(obj.initial.rotation):
        raise InvalidDescriptor(f"{obj.id!r}: rotation is not unit norm")
    if any(s <= 0.0 for s in obj.initial.scale):
        raise InvalidDescriptor(f"{obj.id!r}: non-positive scale")


# --- resolved state ------------------------------------------------------


@dataclass(frozen=True)
class Decoration:
    """Per-frame transient visual produced by a decoration effect."""

    kind: str  # "arrow" | "fire"
    effect_id: str
    detail: tuple[tuple[str, object], ...] = ()

    def as_dict(self) -> dict[str, object]:
        out: dict[str, object] = {"kind": self.kind, "effect": self.effect_id}
        out.update(self.detail)
        return out


@dataclass(frozen=True)
class ObjectSnapshot:
    transform: Transform
    state: str | None
    pose: tuple[Vec3, ...] | None
    attached_to: tuple[str, str] | None
    decorations: tuple[Decoration, ...] = ()

    def joint_world(self, joint: str) -> Vec3:
        if self.pose is None:
            raise UnknownAnchor(f"no pose for joint {joint!r}")
        return self.transform.apply(self.pose[JOINT_INDEX[joint]])


@dataclass(frozen=True)
class SceneState:
    """Fully resolved world state at one frame; one entry per object."""

    frame: int
    objects: dict[str, ObjectSnapshot]
    floor_plan: FloorPlan

    def position(self, object_id: str) -> Vec3:
        return self.objects[object_id].transform.position

    def ground(self, object_id: str) -> Vec2:
        p = self.objects[object_id].transform.position
        return (p[0], p[2])


def initial_snapshot(obj: ControllableObject) -> ObjectSnapshot:
    pose = DEFAULT_POSE if obj.cls is ObjectClass.CHARACTER else None
    return ObjectSnapshot(
        transform=replace(obj.initial),
        state=obj.initial_state,
        pose=pose,
        attached_to=obj.attachment,
    )


# --- queries -------------------------------------------------------------

DEFAULT_FOV_DEGREES = 100.0


@dataclass(frozen=True)
class VisibilityResult:
    visible: bool
    blocked_by: Wall | None = None
    reason: str = "visible"  # "visible" | "outside-fov" | "occluded"


def visible_from(
    state: SceneState,
    observer: Vec2,
    heading_deg: float,
    target_id: str,
    fov_deg: float = DEFAULT_FOV_DEGREES,
) -> VisibilityResult:
    """Line-of-sight check on the floor plane.

    The target is visible when the bearing from observer to its ground
    position falls inside the horizontal field of view and no wall segment
    crosses the sight line strictly between the two points.
    """
    if target_id not in state.objects:
        raise UnknownTarget(f"no object {target_id!r}")
    target = state.ground(target_id)
    dx, dz = target[0] - observer[0], target[1] - observer[1]
    if dx == 0.0 and dz == 0.0:
        return VisibilityResult(True)
    if fov_deg < 360.0:
        bearing = math.degrees(math.atan2(dz, dx))
        delta = (bearing - heading_deg + 180.0) % 360.0 - 180.0
        if abs(delta) > fov_deg / 2.0:
            return VisibilityResult(False, None, "outside-fov")
    blocker = first_blocking_wall(state.floor_plan, observer, target)
    if blocker is not None:
        return VisibilityResult(False, blocker, "occluded")
    return VisibilityResult(True)


def first_blocking_wall(plan: FloorPlan, a: Vec2, b: Vec2) -> Wall | None:
    """Wall crossing segment a->b nearest to a, or None. Endpoints on a wall
    do not count as blocked (standing against a wall can still see out)."""
    eps = 1e-12
    best_t = None
    best_wall = None
    for wall in plan.walls:
        t = seg_intersect(a, b, wall.a, wall.b)
        if t is None or t <= eps or t >= 1.0 - eps:
            continue
        if best_t is None or t < best_t:
            best_t = t
            best_wall = wall
    return best_wall


def closest_approach(
    path_a: list[tuple[int, Vec2]], path_b: list[tuple[int, Vec2]]
) -> tuple[float, int]:
    """Minimum synchronous distance between two timed ground paths.

    Both paths must sample the same frame grid. Ties resolve to the earliest
    frame. Returns (distance, frame).
    """
    if not path_a or not path_b:
        raise EmptyPath("both paths need at least one sample")
    frames_a = [f for f, _ in path_a]
    frames_b = [f for f, _ in path_b]
    if frames_a != frames_b:
        raise GridMismatch("paths sample different frame grids")
    best = math.inf
    best_frame = frames_a[0]
    for (f, pa), (_, pb) in zip(path_a, path_b):
        d = math.hypot(pa[0] - pb[0], pa[1] - pb[1])
        if d < best:
            best = d
            best_frame = f
    return best, best_frame


def region_named(plan: FloorPlan, name: str) -> Region:
    for region in plan.regions:
        if region.name == name:
            return region
    raise UnknownTarget(f"no region {name!r}")


def nearest_wall_distance(plan: FloorPlan, p: Vec2) -> float:
    if not plan.walls:
        return math.inf
    return min(point_segment_distance(p, w.a, w.b) for w in plan.walls)
