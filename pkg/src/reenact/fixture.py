"""Bundled reference scenario: a hallway-and-lounge confrontation.

The package ships one fully authored scene so demos, tests, and the CLI
have a non-trivial project to chew on without any external files.  Three
characters (a witness in the hallway, a defender, and an attacker in the
lounge), three interactive props (knife, bat, bin), a wall layout with a
doorway, and about a minute of keyframed action including two grab/release
hand-offs and a ballistic bat drop.
"""

from __future__ import annotations

from importlib.resources import files

from .dsl import parse_scenario
from .persistence import load_project
from .project import Project

SCENARIO_NAME = "hallway_lounge"


def _data(name: str):
    return files("reenact").joinpath("data").joinpath(name)


def scenario_text() -> str:
    """Return the bundled scenario script as text."""
    return _data(f"{SCENARIO_NAME}.crimescn").read_text(encoding="utf-8")


def scenario_project_bytes() -> bytes:
    """Return the pre-serialized project file for the bundled scenario."""
    return _data(f"{SCENARIO_NAME}.crimeproj").read_bytes()


def load_scenario() -> Project:
    """Parse the bundled scenario script into a fresh project."""
    return parse_scenario(scenario_text())


def load_scenario_project() -> Project:
    """Load the pre-serialized twin of the bundled scenario."""
    return load_project(scenario_project_bytes())
