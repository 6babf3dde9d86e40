"""Scenario script grammar, printer identity, and semantic analysis."""

import math
import random

import pytest

from reenact.dsl import (
    AttachDecl,
    DslSemanticError,
    DslSyntaxError,
    EffectDecl,
    EventDecl,
    GrabDecl,
    KeyframeDecl,
    ObjectDecl,
    ParamDecl,
    RegionDecl,
    ReleaseDecl,
    SceneDecl,
    Script,
    SlotDecl,
    SpawnDecl,
    TrackDecl,
    WallDecl,
    parse_scenario,
    parse_script,
    print_script,
)
from reenact.persistence import save_project
from reenact.playback import state_at
from reenact.scene import ObjectClass

MINIMAL = """
track "Solo" {
  slot [0, 10] {
    effect RigidTransform target="crate" {
      keyframe 0 => (0, 0, 0);
      keyframe 10 => (2, 0, 0);
    }
  }
}
"""

SCENE_HEADER = """
scene {
  rate 30;
  prop "crate" { position = (0, 0, 0); }
}
"""


def test_minimal_script_builds_one_of_each():
    p = parse_scenario(SCENE_HEADER + MINIMAL)
    assert len(p.timeline.tracks) == 1
    track = p.timeline.tracks[0]
    assert track.name == "Solo"
    assert len(track.slots) == 1
    slot = track.slots[0]
    assert (slot.start, slot.end) == (0, 10)
    assert len(slot.effects) == 1
    effect = slot.effects[0]
    assert effect.type == "RigidTransform"
    assert sorted(effect.channels) == ["position.x", "position.y", "position.z"]
    assert state_at(p, 5).position("crate")[0] == pytest.approx(1.0)


def test_full_scene_block():
    text = """
    scene {
      rate 60;
      character "hero" { position = (1, 0, 1); }
      prop "door" { states = [closed, open]; state = open; }
      marker "hint" { text = "look\\u00e9 \\"here\\"\\n"; }
      camera_preset "top" { position = (0, 9, 0); }
      environment "table";
      wall (0, 0) -> (6, 0);
      region "room" polygon (0, 0) (6, 0) (6, 6) (0, 6);
      spawn "start" (2, 2);
      attach "hint" to "hero" anchor "left_hand";
    }
    """
    p = parse_scenario(text)
    assert p.frame_rate == 60
    assert p.scene.get("door").initial_state == "open"
    assert p.scene.get("door").triggerable
    assert p.scene.get("hint").payload == 'looké "here"\n'
    assert not p.scene.get("table").triggerable
    assert p.scene.get("hint").attachment == ("hero", "left_hand")
    plan = p.scene.floor_plan
    assert len(plan.walls) == 1 and len(plan.regions) == 1
    assert plan.spawns["start"] == (2.0, 2.0)
    assert p.scene.get("top").cls is ObjectClass.CAMERA_PRESET


def test_overlapping_slots_cite_both_locations():
    text = SCENE_HEADER + """
track "Solo" {
  slot [0, 10] {
  }
  slot [5, 20] {
  }
}
"""
    with pytest.raises(DslSemanticError) as err:
        parse_scenario(text)
    e = err.value
    assert e.cause_code == "OverlapRejected"
    assert "Constraint 3" in str(e)
    assert (e.line, e.col) != e.other
    assert e.other is not None  # the first slot's location
    first_slot_line = text.split("\n").index("  slot [0, 10] {") + 1
    assert e.other[0] == first_slot_line
    assert e.line == first_slot_line + 2


def test_short_vector_is_a_syntax_error_with_position():
    text = SCENE_HEADER + """
track "Solo" {
  slot [0, 10] {
    effect RigidTransform target="crate" {
      keyframe 5 => (1, 2);
    }
  }
}
"""
    with pytest.raises(DslSyntaxError) as err:
        parse_scenario(text)
    assert "3-vector" in err.value.expected
    lines = text.split("\n")
    row = next(i for i, ln in enumerate(lines) if "keyframe" in ln) + 1
    assert err.value.line == row
    assert err.value.col == lines[row - 1].index("(") + 1


def test_unknown_effect_type_rejected():
    text = SCENE_HEADER + 'track "T" { slot [0, 5] { effect WarpDrive target="crate"; } }'
    with pytest.raises(DslSemanticError) as err:
        parse_scenario(text)
    assert err.value.cause_code == "UnknownEffect"


def test_undeclared_event_state_rejected():
    text = """
    scene { prop "door" { states = [closed, open]; } }
    track "T" { slot [0, 5] {
      effect InteractiveState target="door" { event 2 => ajar; }
    } }
    """
    with pytest.raises(DslSemanticError) as err:
        parse_scenario(text)
    assert err.value.cause_code == "InvalidState"


def test_duplicate_type_target_pair_rejected():
    text = SCENE_HEADER + """
    track "T" { slot [0, 5] {
      effect RigidTransform target="crate";
      effect RigidTransform target="crate";
    } }
    """
    with pytest.raises(DslSemanticError) as err:
        parse_scenario(text)
    assert err.value.cause_code == "DuplicateEffectTarget"
    assert "Constraint 2" in str(err.value)


def test_missing_required_param_rejected():
    text = """
    scene { prop "a"; prop "b"; }
    track "T" { slot [0, 5] { effect FloatingArrows target="a"; } }
    """
    with pytest.raises(DslSemanticError) as err:
        parse_scenario(text)
    assert err.value.cause_code == "InvalidParam"


def test_attach_cycle_rejected():
    text = """
    scene {
      character "a"; character "b";
      attach "a" to "b" anchor "left_hand";
      attach "b" to "a" anchor "left_hand";
    }
    """
    with pytest.raises(DslSemanticError) as err:
        parse_scenario(text)
    assert err.value.cause_code == "CycleRejected"


def test_self_intersecting_region_rejected():
    text = 'scene { region "bow" polygon (0, 0) (4, 4) (4, 0) (0, 4); }'
    with pytest.raises(DslSemanticError) as err:
        parse_scenario(text)
    assert err.value.cause_code == "InvalidDescriptor"


def test_missing_semicolon_is_syntax_error():
    text = 'scene { rate 30 }'
    with pytest.raises(DslSyntaxError) as err:
        parse_script(text)
    assert err.value.expected == "';'"
    assert err.value.line == 1 and err.value.col == 17


def test_unterminated_string():
    with pytest.raises(DslSyntaxError) as err:
        parse_script('track "oops {')
    assert "unterminated" in str(err.value)


def test_bad_escape_and_bad_character():
    with pytest.raises(DslSyntaxError):
        parse_script('scene { prop "a\\q"; }')
    with pytest.raises(DslSyntaxError) as err:
        parse_script("scene { rate @30; }")
    assert "unexpected character" in str(err.value)


def test_fractional_frame_rejected():
    with pytest.raises(DslSyntaxError) as err:
        parse_script(SCENE_HEADER + 'track "T" { slot [0, 2.5] { } }')
    assert "frame" in err.value.expected and "2.5" in str(err.value)


def test_negative_keyframe_frame_rejected():
    text = SCENE_HEADER + (
        'track "T" { slot [0, 5] { effect RigidTransform target="crate" {'
        " keyframe -3 => (0, 0, 0); } } }"
    )
    with pytest.raises(DslSemanticError) as err:
        parse_scenario(text)
    assert "negative frame" in str(err.value)


def test_non_unit_rotation_keyframe_rejected():
    text = SCENE_HEADER + (
        'track "T" { slot [0, 5] { effect RigidTransform target="crate" {'
        " keyframe rotation 0 => (2, 0, 0, 0); } } }"
    )
    with pytest.raises(DslSemanticError) as err:
        parse_scenario(text)
    assert "unit" in str(err.value)


def test_event_outside_state_effect_rejected():
    # the state is declared on the target, but the effect type holds no
    # state channel, so the write itself is what gets rejected
    text = """
    scene { prop "door" { states = [closed, open]; } }
    track "T" { slot [0, 5] {
      effect RigidTransform target="door" { event 2 => open; }
    } }
    """
    with pytest.raises(DslSemanticError) as err:
        parse_scenario(text)
    assert err.value.cause_code == "InvalidParam"


def test_track_flags_applied_after_population():
    text = SCENE_HEADER + """
    track "Held" muted locked {
      slot [0, 5] { effect RigidTransform target="crate"; }
    }
    """
    p = parse_scenario(text)
    track = p.timeline.tracks[0]
    assert track.muted and track.locked
    assert len(track.slots[0].effects) == 1  # filled before the lock landed


def test_grab_release_ride_and_freeze():
    text = """
    scene {
      rate 30;
      character "hero" { position = (0, 0, 0); }
      prop "knife" { position = (1, 0, 2); }
    }
    track "Hero" {
      slot [0, 60] {
        effect RigidTransform target="hero" {
          keyframe 0 => (0, 0, 0);
          keyframe position.x 60 => 6;
        }
        effect RigidTransform target="knife" {
          grab 15 => "hero".right_hand;
          release 45;
        }
      }
    }
    """
    p = parse_scenario(text)
    knife_effect = next(
        e
        for e in p.timeline.tracks[0].slots[0].effects
        if e.target_id == "knife"
    )
    samples = knife_effect.channels["attachment"].samples
    assert samples[0][0] == 15 and samples[0][1][0] == "hero"
    assert samples[-1] == (45, None)
    # no snap at grab, constant offset while carried
    st15 = state_at(p, 15)
    assert st15.position("knife") == pytest.approx((1.0, 0.0, 2.0), abs=1e-9)
    offset = [
        k - h
        for k, h in zip(st15.position("knife"), st15.objects["hero"].joint_world("r_wrist"))
    ]
    st30 = state_at(p, 30)
    want = [h + o for h, o in zip(st30.objects["hero"].joint_world("r_wrist"), offset)]
    assert st30.position("knife") == pytest.approx(want, abs=1e-9)
    # frozen at the carried pose after release
    st45 = state_at(p, 45)
    st50 = state_at(p, 50)
    assert st50.position("knife") == pytest.approx(st45.position("knife"), abs=1e-12)
    assert math.dist(state_at(p, 44).position("knife"), st45.position("knife")) < 0.2


def test_grab_unknown_anchor_rejected():
    text = """
    scene { character "hero"; prop "knife"; }
    track "T" { slot [0, 9] {
      effect RigidTransform target="knife" { grab 2 => "hero".tail; }
    } }
    """
    with pytest.raises(DslSemanticError) as err:
        parse_scenario(text)
    assert err.value.cause_code == "UnknownAnchor"


def test_comments_and_empty_bodies():
    text = """
    # leading commentary
    scene {
      prop "bin";   # no body needed
    }
    track "T" {   # flags optional
      slot [0, 4] {
        effect Fire target="bin";   # params take their defaults
      }
    }
    """
    p = parse_scenario(text)
    effect = p.timeline.tracks[0].slots[0].effects[0]
    assert effect.params["apply_fire"] is True
    assert effect.params["explosion_type"] == "none"


def test_params_parse_each_value_shape():
    text = """
    scene { prop "a"; prop "b"; }
    track "T" { slot [0, 40] {
      effect FloatingArrows target="a" { dest = "b"; cycle = 20; }
      effect Fire target="b" { apply_fire = false; explosion_type = burst; }
    } }
    """
    p = parse_scenario(text)
    arrows, fire = p.timeline.tracks[0].slots[0].effects
    assert arrows.params == {"dest": "b", "cycle": 20}
    assert fire.params["apply_fire"] is False
    assert fire.params["explosion_type"] == "burst"


def test_duplicate_param_rejected():
    text = SCENE_HEADER + (
        'track "T" { slot [0, 5] { effect RigidTransform target="crate" {'
        " physics = true; physics = false; } } }"
    )
    with pytest.raises(DslSemanticError) as err:
        parse_scenario(text)
    assert "set twice" in str(err.value)


def test_printed_script_builds_identical_bytes():
    for text in (SCENE_HEADER + MINIMAL, _FULL_DEMO):
        direct = save_project(parse_scenario(text))
        reprinted = save_project(parse_scenario(print_script(parse_script(text))))
        assert reprinted == direct


_FULL_DEMO = """
scene {
  rate 30;
  character "hero" { position = (0, 0, 0); }
  prop "door" { states = [closed, open]; }
  prop "ball" { position = (0, 5, 0); }
  wall (0, 0) -> (9, 0);
  spawn "in" (1, 1);
}
track "Main" {
  slot [0, 30] {
    effect RigidTransform target="hero" {
      keyframe 0 => (0, 0, 0);
      keyframe 30 => (3, 0, 0);
      keyframe rotation 0 => (1, 0, 0, 0);
    }
    effect InteractiveState target="door" { event 7 => open; }
  }
  slot [31, 90] {
    effect RigidTransform target="ball" { physics = true; }
  }
}
track "Ambience" muted {
  slot [0, 45] { effect Fire target="door" { firewall_type = "line"; } }
}
"""


# --- printer identity over random ASTs ---


def _rand_num(rng):
    if rng.random() < 0.5:
        return rng.randint(-40, 40)
    return round(rng.uniform(-40.0, 40.0), 3)


def _rand_vec(rng, n):
    return tuple(_rand_num(rng) for _ in range(n))


_TRICKY_STRINGS = (
    "plain",
    'quoted "middle"',
    "tab\there",
    "new\nline",
    "back\\slash",
    "café corner",
    "emoji ✨",
)


def _rand_str(rng):
    return rng.choice(_TRICKY_STRINGS) + str(rng.randint(0, 99))


def _rand_object(rng, idx):
    o = ObjectDecl(cls=rng.choice([c.value for c in ObjectClass]), id=f"obj{idx}")
    if rng.random() < 0.4:
        o.name = _rand_str(rng)
    if rng.random() < 0.6:
        o.position = _rand_vec(rng, 3)
    if rng.random() < 0.3:
        o.rotation = _rand_vec(rng, 4)
    if rng.random() < 0.3:
        o.scale = _rand_vec(rng, 3)
    if rng.random() < 0.4:
        o.states = tuple(
            rng.sample(["idle", "hot", "done", "alt"], rng.randint(1, 3))
        )
        if rng.random() < 0.7:
            o.state = rng.choice(o.states)
    if rng.random() < 0.3:
        o.text = _rand_str(rng)
    return o


def _rand_statement(rng):
    roll = rng.random()
    if roll < 0.55:
        channel = rng.choice(
            [None, "position", "position.x", "position.y", "rotation", "scale", "joint.l_wrist"]
        )
        if channel in ("position.x", "position.y"):
            value = _rand_num(rng)
        elif channel == "rotation":
            value = _rand_vec(rng, 4)
        else:
            value = _rand_vec(rng, 3)
        return KeyframeDecl(channel, rng.randint(0, 300), value)
    if roll < 0.75:
        return EventDecl(rng.randint(0, 300), rng.choice(["idle", "hot", "done"]))
    if roll < 0.9:
        return GrabDecl(
            rng.randint(0, 300),
            f"obj{rng.randint(0, 5)}",
            rng.choice(["left_hand", "right_hand"]),
        )
    return ReleaseDecl(rng.randint(0, 300))


def _rand_effect(rng):
    e = EffectDecl(
        type=rng.choice(
            ["RigidTransform", "PoseTrack", "InteractiveState", "FloatingArrows", "Fire"]
        ),
        target=f"obj{rng.randint(0, 5)}",
    )
    for key in rng.sample(["physics", "cycle", "dest", "extra"], rng.randint(0, 2)):
        value = rng.choice([True, False, rng.randint(0, 60), _rand_num(rng), _rand_str(rng), "bare_word"])
        e.params.append(ParamDecl(key, value))
    for _ in range(rng.randint(0, 4)):
        e.statements.append(_rand_statement(rng))
    return e


def _rand_ast(rng):
    script = Script()
    if rng.random() < 0.9:
        sc = SceneDecl()
        if rng.random() < 0.8:
            sc.rate = rng.choice([24, 30, 60])
        for i in range(rng.randint(0, 4)):
            sc.objects.append(_rand_object(rng, i))
        for _ in range(rng.randint(0, 2)):
            sc.walls.append(WallDecl(_rand_vec(rng, 2), _rand_vec(rng, 2)))
        for _ in range(rng.randint(0, 2)):
            sc.regions.append(
                RegionDecl(_rand_str(rng), tuple(_rand_vec(rng, 2) for _ in range(3)))
            )
        for _ in range(rng.randint(0, 2)):
            sc.spawns.append(SpawnDecl(_rand_str(rng), _rand_vec(rng, 2)))
        for _ in range(rng.randint(0, 2)):
            sc.attaches.append(
                AttachDecl(
                    f"obj{rng.randint(0, 5)}",
                    f"obj{rng.randint(0, 5)}",
                    rng.choice(["left_hand", "right_hand"]),
                )
            )
        script.scene = sc
    for t in range(rng.randint(0, 3)):
        tr = TrackDecl(
            name=_rand_str(rng),
            muted=rng.random() < 0.3,
            locked=rng.random() < 0.2,
        )
        for _ in range(rng.randint(0, 3)):
            start = rng.randint(0, 200)
            sl = SlotDecl(start=start, end=start + rng.randint(0, 60))
            for _ in range(rng.randint(0, 3)):
                sl.effects.append(_rand_effect(rng))
            tr.slots.append(sl)
        script.tracks.append(tr)
    return script


def test_parse_print_identity_500_random_asts():
    rng = random.Random(20260816)
    for _ in range(500):
        ast = _rand_ast(rng)
        printed = print_script(ast)
        assert parse_script(printed) == ast
        # printing is a fixed point
        assert print_script(parse_script(printed)) == printed


def test_empty_script_roundtrip():
    assert parse_script("") == Script()
    assert print_script(Script()) == ""
    p = parse_scenario("")
    assert p.timeline.tracks == [] and p.scene.objects == {}
