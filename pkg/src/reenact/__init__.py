"""reenact: deterministic animation sequencing for incident reconstruction.

A project couples a scene (characters, props, markers, a floor plan) with a
timeline of prioritized tracks whose slots hold effects. Playback resolves
every frame by scanning from frame 0, so seeking anywhere is exact, and the
analytics layer turns exported traces and headset telemetry into density
maps, gaze arcs and path comparisons.
"""

from .errors import EngineError
from .mathx import Transform
from .project import Project
from .scene import ControllableObject, FloorPlan, ObjectClass, Scene, SceneState
from .timeline import Timeline

__all__ = [
    "ControllableObject",
    "EngineError",
    "FloorPlan",
    "ObjectClass",
    "Project",
    "Scene",
    "SceneState",
    "Timeline",
    "Transform",
]

__version__ = "0.1.0"
