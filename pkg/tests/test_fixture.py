"""Bundled hallway-and-lounge scenario: integrity and story beats."""

import math
import time

import pytest

from reenact.fixture import (
    load_scenario,
    load_scenario_project,
    scenario_project_bytes,
    scenario_text,
)
from reenact.persistence import save_project
from reenact.playback import export_trace, ground_paths
from reenact.scene import ObjectClass, closest_approach, visible_from

_TRACE = None


def full_trace():
    global _TRACE
    if _TRACE is None:
        p = load_scenario()
        _TRACE = export_trace(p, 0, p.duration)
    return _TRACE


def marked_range(project):
    payload = project.scene.get("inside_room_action").payload
    lo, hi = payload.removeprefix("frames=").split("..")
    return int(lo), int(hi)


def test_scenario_parses_and_validates():
    p = load_scenario()
    assert p.validate() == []


def test_scenario_duration_and_rate():
    p = load_scenario()
    assert p.frame_rate == 30
    assert p.duration == 1800


def test_scenario_roster():
    p = load_scenario()
    classes = {oid: o.cls for oid, o in p.scene.objects.items()}
    assert classes["witness"] is ObjectClass.CHARACTER
    assert classes["attacker"] is ObjectClass.CHARACTER
    assert classes["defender"] is ObjectClass.CHARACTER
    assert classes["knife"] is ObjectClass.PROP
    assert classes["bat"] is ObjectClass.PROP
    assert classes["bin"] is ObjectClass.PROP
    assert p.scene.get("attacker").states == ("standing", "fallen")
    assert p.scene.get("bat").states == ("rest", "strike")
    assert p.scene.get("bin").states == ("empty", "full")
    names = {w for w in p.scene.floor_plan.spawns}
    assert names == {"witness_start", "defender_start", "attacker_seat"}
    assert len(p.scene.floor_plan.walls) == 7
    assert {r.name for r in p.scene.floor_plan.regions} == {"hallway", "lounge"}


def test_project_file_is_regeneration_of_script():
    committed = scenario_project_bytes()
    regenerated = save_project(load_scenario())
    assert committed == regenerated


def test_project_file_loads_and_round_trips():
    p = load_scenario_project()
    assert p.validate() == []
    assert save_project(p) == scenario_project_bytes()


def test_closest_approach_witness_defender():
    states = full_trace()
    paths = ground_paths(states, ["witness", "defender"])
    dist, frame = closest_approach(paths["witness"], paths["defender"])
    assert 17.0 <= dist <= 18.0
    assert dist == pytest.approx(17.5018, abs=1e-3)
    assert frame == 0


def test_attacker_occluded_from_witness_for_marked_frames():
    p = load_scenario()
    lo, hi = marked_range(p)
    assert (lo, hi) == (600, 1700)
    states = full_trace()
    for f in range(lo, hi + 1):
        st = states[f]
        w = st.objects["witness"].transform.position
        res = visible_from(st, (w[0], w[2]), 0.0, "attacker", fov_deg=360.0)
        assert not res.visible, f


def test_exactly_two_bat_strikes():
    states = full_trace()
    onsets = [
        f
        for f in range(1, len(states))
        if states[f].objects["bat"].state == "strike"
        and states[f - 1].objects["bat"].state != "strike"
    ]
    assert len(onsets) == 2


def test_hand_props_follow_grabs():
    states = full_trace()
    assert states[400].objects["knife"].attached_to == ("attacker", "right_hand")
    assert states[1000].objects["bat"].attached_to == ("defender", "right_hand")
    assert states[1400].objects["bat"].attached_to is None


def test_bat_falls_and_rests_after_release():
    states = full_trace()
    release = states[1300].objects["bat"].transform.position
    rest = states[1500].objects["bat"].transform.position
    assert rest[1] == pytest.approx(0.0, abs=1e-9)
    # it dropped near where it was let go, not back at the couch
    assert math.hypot(rest[0] - release[0], rest[2] - release[2]) < 0.5
    couch = load_scenario().scene.get("couch").initial.position
    assert math.hypot(rest[0] - couch[0], rest[2] - couch[2]) > 0.5
    assert states[1800].objects["bat"].transform.position == rest


def test_attacker_falls_and_stays_down():
    states = full_trace()
    assert states[1100].objects["attacker"].state == "standing"
    assert states[1500].objects["attacker"].state == "fallen"
    assert states[1800].objects["attacker"].state == "fallen"


def test_bin_fills_and_stays_full():
    states = full_trace()
    assert states[300].objects["bin"].state == "empty"
    assert states[1700].objects["bin"].state == "full"


def test_full_trace_export_is_fast():
    p = load_scenario()
    t0 = time.perf_counter()
    states = export_trace(p, 0, p.duration)
    elapsed = time.perf_counter() - t0
    assert len(states) == p.duration + 1
    assert elapsed < 5.0


def test_script_text_is_bundled():
    text = scenario_text()
    assert "hallway" in text
    assert text.endswith("\n")
