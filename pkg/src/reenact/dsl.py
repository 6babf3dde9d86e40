"""Scenario script text format: lexer, LL(1) parser, printer, and builder.

A script declares a scene followed by tracks:

    # comments run to end of line
    scene {
      rate 30;
      character "hero" { position = (0, 0, 0); }
      prop "door" { states = [closed, open]; state = closed; }
      wall (0, 0) -> (4, 0);
      region "room" polygon (0, 0) (4, 0) (4, 4);
      spawn "start" (1, 1);
      attach "badge" to "hero" anchor "left_hand";
    }
    track "Hero" {
      slot [0, 30] {
        effect RigidTransform target="hero" {
          physics = false;
          keyframe 0 => (0, 0, 0);        # bare keyframes drive position
          keyframe position.x 30 => 3;    # or name any writable channel
          grab 10 => "hero".right_hand;   # on a prop effect: carry it
          release 25;                     # freeze where it was carried
        }
        effect InteractiveState target="door" {
          event 12 => open;
        }
      }
    }

Numbers are unit-free (metres, frames, degrees of freedom as the channel
defines them); there are no expressions. Every parse error carries line and
column; semantic errors additionally cite the engine rule they violate and,
for slot overlaps, the other slot's location.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .effects import KIND_QUAT, KIND_SCALAR, KIND_VEC3, channel_kind
from .errors import EngineError, InvalidParam, OverlapRejected
from .mathx import Transform, q_is_unit
from .playback import write_grab_keyframes, write_release_keyframes
from .project import Project
from .scene import ControllableObject, ObjectClass


class DslSyntaxError(EngineError):
    code = "SyntaxError"

    def __init__(self, message: str, line: int, col: int, expected: str | None = None):
        tail = f" (expected {expected})" if expected else ""
        super().__init__(f"{line}:{col}: {message}{tail}")
        self.line = line
        self.col = col
        self.expected = expected


class DslSemanticError(EngineError):
    code = "SemanticError"

    def __init__(
        self,
        message: str,
        line: int,
        col: int,
        cause_code: str | None = None,
        other: tuple[int, int] | None = None,
    ):
        tail = f" (see also {other[0]}:{other[1]})" if other else ""
        super().__init__(f"{line}:{col}: {message}{tail}")
        self.line = line
        self.col = col
        self.cause_code = cause_code
        self.other = other


# --- tokens ----------------------------------------------------------------

_PUNCT2 = ("->", "=>")
_PUNCT1 = "{}()[],;=."
_CLASS_KEYWORDS = tuple(c.value for c in ObjectClass)
_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r", "/": "/"}


@dataclass(frozen=True)
class Token:
    type: str  # "ident" | "string" | "number" | "punct" | "eof"
    value: Any
    line: int
    col: int


def _lex(text: str) -> list[Token]:
    out: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def err(msg: str) -> DslSyntaxError:
        return DslSyntaxError(msg, line, col)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if text[i : i + 2] in _PUNCT2:
            out.append(Token("punct", text[i : i + 2], start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT1:
            out.append(Token("punct", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        if ch == '"':
            i += 1
            col += 1
            chars: list[str] = []
            while True:
                if i >= n or text[i] == "\n":
                    raise DslSyntaxError("unterminated string", start_line, start_col)
                c = text[i]
                if c == '"':
                    i += 1
                    col += 1
                    break
                if c == "\\":
                    if i + 1 >= n:
                        raise DslSyntaxError("unterminated string", start_line, start_col)
                    esc = text[i + 1]
                    if esc == "u":
                        hexpart = text[i + 2 : i + 6]
                        if len(hexpart) != 4 or any(
                            h not in "0123456789abcdefABCDEF" for h in hexpart
                        ):
                            raise err("bad \\u escape")
                        chars.append(chr(int(hexpart, 16)))
                        i += 6
                        col += 6
                        continue
                    if esc not in _ESCAPES:
                        raise err(f"bad escape \\{esc}")
                    chars.append(_ESCAPES[esc])
                    i += 2
                    col += 2
                    continue
                chars.append(c)
                i += 1
                col += 1
            out.append(Token("string", "".join(chars), start_line, start_col))
            continue
        if ch.isdigit() or (ch in "-." and i + 1 < n and (text[i + 1].isdigit() or text[i + 1] == ".")):
            j = i
            if text[j] == "-":
                j += 1
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                j += 1
                if j < n and text[j] in "+-":
                    j += 1
                while j < n and text[j].isdigit():
                    j += 1
            raw = text[i:j]
            try:
                value: Any = int(raw)
            except ValueError:
                try:
                    value = float(raw)
                except ValueError:
                    raise err(f"bad number {raw!r}") from None
            out.append(Token("number", value, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(Token("ident", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        raise err(f"unexpected character {ch!r}")
    out.append(Token("eof", None, line, col))
    return out


# --- AST --------------------------------------------------------------------


def _loc_field():
    return field(default=(0, 0), compare=False)


@dataclass
class ObjectDecl:
    cls: str
    id: str
    name: str | None = None
    position: tuple[float, float, float] | None = None
    rotation: tuple[float, float, float, float] | None = None
    scale: tuple[float, float, float] | None = None
    states: tuple[str, ...] = ()
    state: str | None = None
    text: str | None = None
    loc: tuple[int, int] = _loc_field()


@dataclass
class WallDecl:
    a: tuple[float, float]
    b: tuple[float, float]
    loc: tuple[int, int] = _loc_field()


@dataclass
class RegionDecl:
    name: str
    vertices: tuple[tuple[float, float], ...]
    loc: tuple[int, int] = _loc_field()


@dataclass
class SpawnDecl:
    name: str
    point: tuple[float, float]
    loc: tuple[int, int] = _loc_field()


@dataclass
class AttachDecl:
    child: str
    parent: str
    anchor: str
    loc: tuple[int, int] = _loc_field()


@dataclass
class SceneDecl:
    rate: int | None = None
    objects: list[ObjectDecl] = field(default_factory=list)
    walls: list[WallDecl] = field(default_factory=list)
    regions: list[RegionDecl] = field(default_factory=list)
    spawns: list[SpawnDecl] = field(default_factory=list)
    attaches: list[AttachDecl] = field(default_factory=list)
    loc: tuple[int, int] = _loc_field()


@dataclass
class ParamDecl:
    key: str
    value: Any
    loc: tuple[int, int] = _loc_field()


@dataclass
class KeyframeDecl:
    channel: str | None
    frame: int
    value: Any
    loc: tuple[int, int] = _loc_field()


@dataclass
class EventDecl:
    frame: int
    state: str
    loc: tuple[int, int] = _loc_field()


@dataclass
class GrabDecl:
    frame: int
    parent: str
    anchor: str
    loc: tuple[int, int] = _loc_field()


@dataclass
class ReleaseDecl:
    frame: int
    loc: tuple[int, int] = _loc_field()


@dataclass
class EffectDecl:
    type: str
    target: str
    params: list[ParamDecl] = field(default_factory=list)
    statements: list = field(default_factory=list)
    loc: tuple[int, int] = _loc_field()


@dataclass
class SlotDecl:
    start: int
    end: int
    effects: list[EffectDecl] = field(default_factory=list)
    loc: tuple[int, int] = _loc_field()


@dataclass
class TrackDecl:
    name: str
    muted: bool = False
    locked: bool = False
    slots: list[SlotDecl] = field(default_factory=list)
    loc: tuple[int, int] = _loc_field()


@dataclass
class Script:
    scene: SceneDecl | None = None
    tracks: list[TrackDecl] = field(default_factory=list)


# --- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def _fail(self, expected: str) -> DslSyntaxError:
        tok = self.cur
        shown = "end of file" if tok.type == "eof" else repr(tok.value)
        return DslSyntaxError(
            f"unexpected {shown}", tok.line, tok.col, expected=expected
        )

    def advance(self) -> Token:
        tok = self.cur
        if tok.type != "eof":
            self.pos += 1
        return tok

    def eat_punct(self, value: str) -> Token:
        if self.cur.type == "punct" and self.cur.value == value:
            return self.advance()
        raise self._fail(repr(value))

    def eat_ident(self, what: str = "an identifier") -> Token:
        if self.cur.type == "ident":
            return self.advance()
        raise self._fail(what)

    def eat_keyword(self, word: str) -> Token:
        if self.cur.type == "ident" and self.cur.value == word:
            return self.advance()
        raise self._fail(repr(word))

    def eat_string(self) -> Token:
        if self.cur.type == "string":
            return self.advance()
        raise self._fail("a quoted string")

    def eat_number(self) -> Token:
        if self.cur.type == "number":
            return self.advance()
        raise self._fail("a number")

    def eat_int(self, what: str = "an integer") -> Token:
        tok = self.eat_number()
        if not isinstance(tok.value, int):
            raise DslSyntaxError(
                f"got {tok.value!r}", tok.line, tok.col, expected=what
            )
        return tok

    def at_keyword(self, *words: str) -> bool:
        return self.cur.type == "ident" and self.cur.value in words

    def at_punct(self, value: str) -> bool:
        return self.cur.type == "punct" and self.cur.value == value

    # -- grammar --

    def script(self) -> Script:
        out = Script()
        while self.cur.type != "eof":
            if self.at_keyword("scene"):
                if out.scene is not None:
                    raise DslSyntaxError(
                        "more than one scene block", self.cur.line, self.cur.col
                    )
                out.scene = self.scene_block()
            elif self.at_keyword("track"):
                out.tracks.append(self.track_block())
            else:
                raise self._fail("'scene' or 'track'")
        return out

    def scene_block(self) -> SceneDecl:
        tok = self.eat_keyword("scene")
        node = SceneDecl(loc=(tok.line, tok.col))
        self.eat_punct("{")
        while not self.at_punct("}"):
            if self.at_keyword("rate"):
                rtok = self.advance()
                if node.rate is not None:
                    raise DslSyntaxError("rate set twice", rtok.line, rtok.col)
                node.rate = self.eat_int("a frame rate").value
                self.eat_punct(";")
            elif self.at_keyword(*_CLASS_KEYWORDS):
                node.objects.append(self.object_decl())
            elif self.at_keyword("wall"):
                wtok = self.advance()
                a = self.point()
                self.eat_punct("->")
                b = self.point()
                self.eat_punct(";")
                node.walls.append(WallDecl(a, b, loc=(wtok.line, wtok.col)))
            elif self.at_keyword("region"):
                rtok = self.advance()
                name = self.eat_string().value
                self.eat_keyword("polygon")
                verts = [self.point()]
                while self.at_punct("("):
                    verts.append(self.point())
                self.eat_punct(";")
                node.regions.append(
                    RegionDecl(name, tuple(verts), loc=(rtok.line, rtok.col))
                )
            elif self.at_keyword("spawn"):
                stok = self.advance()
                name = self.eat_string().value
                point = self.point()
                self.eat_punct(";")
                node.spawns.append(SpawnDecl(name, point, loc=(stok.line, stok.col)))
            elif self.at_keyword("attach"):
                atok = self.advance()
                child = self.eat_string().value
                self.eat_keyword("to")
                parent = self.eat_string().value
                self.eat_keyword("anchor")
                anchor = self.eat_string().value
                self.eat_punct(";")
                node.attaches.append(
                    AttachDecl(child, parent, anchor, loc=(atok.line, atok.col))
                )
            else:
                raise self._fail("a scene statement")
        self.eat_punct("}")
        return node

    def object_decl(self) -> ObjectDecl:
        cls_tok = self.eat_ident()
        id_tok = self.eat_string()
        node = ObjectDecl(
            cls=cls_tok.value, id=id_tok.value, loc=(cls_tok.line, cls_tok.col)
        )
        if self.at_punct(";"):
            self.advance()
            return node
        self.eat_punct("{")
        while not self.at_punct("}"):
            key = self.eat_ident("an object field").value
            self.eat_punct("=")
            if key == "position":
                node.position = self.vector(3)
            elif key == "rotation":
                node.rotation = self.vector(4)
            elif key == "scale":
                node.scale = self.vector(3)
            elif key == "states":
                self.eat_punct("[")
                states = [self.eat_ident("a state name").value]
                while self.at_punct(","):
                    self.advance()
                    states.append(self.eat_ident("a state name").value)
                self.eat_punct("]")
                node.states = tuple(states)
            elif key == "state":
                node.state = self.eat_ident("a state name").value
            elif key == "name":
                node.name = self.eat_string().value
            elif key == "text":
                node.text = self.eat_string().value
            else:
                raise DslSyntaxError(
                    f"unknown object field {key!r}", self.cur.line, self.cur.col
                )
            self.eat_punct(";")
        self.eat_punct("}")
        return node

    def point(self) -> tuple[float, float]:
        return self.vector(2)

    def vector(self, arity: int) -> tuple:
        tok = self.eat_punct("(")
        nums = [self.eat_number().value]
        while self.at_punct(","):
            self.advance()
            nums.append(self.eat_number().value)
        self.eat_punct(")")
        if len(nums) != arity:
            raise DslSyntaxError(
                f"got {len(nums)} numbers",
                tok.line,
                tok.col,
                expected=f"a {arity}-vector",
            )
        return tuple(nums)

    def track_block(self) -> TrackDecl:
        tok = self.eat_keyword("track")
        name = self.eat_string().value
        node = TrackDecl(name=name, loc=(tok.line, tok.col))
        while self.at_keyword("muted", "locked"):
            flag = self.advance().value
            if (flag == "muted" and node.muted) or (flag == "locked" and node.locked):
                raise DslSyntaxError(f"{flag} set twice", tok.line, tok.col)
            setattr(node, flag, True)
        self.eat_punct("{")
        while not self.at_punct("}"):
            node.slots.append(self.slot_block())
        self.eat_punct("}")
        return node

    def slot_block(self) -> SlotDecl:
        tok = self.eat_keyword("slot")
        self.eat_punct("[")
        start = self.eat_int("a start frame").value
        self.eat_punct(",")
        end = self.eat_int("an end frame").value
        self.eat_punct("]")
        node = SlotDecl(start=start, end=end, loc=(tok.line, tok.col))
        self.eat_punct("{")
        while not self.at_punct("}"):
            node.effects.append(self.effect_block())
        self.eat_punct("}")
        return node

    def effect_block(self) -> EffectDecl:
        tok = self.eat_keyword("effect")
        etype = self.eat_ident("an effect type").value
        self.eat_keyword("target")
        self.eat_punct("=")
        target = self.eat_string().value
        node = EffectDecl(type=etype, target=target, loc=(tok.line, tok.col))
        if self.at_punct(";"):
            self.advance()
            return node
        self.eat_punct("{")
        while not self.at_punct("}"):
            if self.at_keyword("keyframe"):
                node.statements.append(self.keyframe_stmt())
            elif self.at_keyword("event"):
                etok = self.advance()
                frame = self.eat_int("a frame").value
                self.eat_punct("=>")
                state = self.eat_ident("a state name").value
                self.eat_punct(";")
                node.statements.append(
                    EventDecl(frame, state, loc=(etok.line, etok.col))
                )
            elif self.at_keyword("grab"):
                gtok = self.advance()
                frame = self.eat_int("a frame").value
                self.eat_punct("=>")
                parent = self.eat_string().value
                self.eat_punct(".")
                anchor = self.eat_ident("an anchor name").value
                self.eat_punct(";")
                node.statements.append(
                    GrabDecl(frame, parent, anchor, loc=(gtok.line, gtok.col))
                )
            elif self.at_keyword("release"):
                rtok = self.advance()
                frame = self.eat_int("a frame").value
                self.eat_punct(";")
                node.statements.append(ReleaseDecl(frame, loc=(rtok.line, rtok.col)))
            else:
                ktok = self.eat_ident("a parameter or statement")
                self.eat_punct("=")
                value = self.param_value()
                self.eat_punct(";")
                node.params.append(
                    ParamDecl(ktok.value, value, loc=(ktok.line, ktok.col))
                )
        self.eat_punct("}")
        return node

    def param_value(self) -> Any:
        tok = self.cur
        if tok.type == "number":
            return self.advance().value
        if tok.type == "string":
            return self.advance().value
        if tok.type == "ident":
            word = self.advance().value
            if word == "true":
                return True
            if word == "false":
                return False
            return word
        raise self._fail("a parameter value")

    def keyframe_stmt(self) -> KeyframeDecl:
        tok = self.eat_keyword("keyframe")
        channel: str | None = None
        if self.cur.type == "ident":
            parts = [self.advance().value]
            while self.at_punct("."):
                self.advance()
                parts.append(self.eat_ident("a channel part").value)
            channel = ".".join(parts)
        frame = self.eat_int("a frame").value
        self.eat_punct("=>")
        vtok = self.cur
        arity = _keyframe_arity(channel)
        if self.cur.type == "number":
            value: Any = self.advance().value
            if arity is not None and arity != 1:
                raise DslSyntaxError(
                    "got a single number",
                    vtok.line,
                    vtok.col,
                    expected=f"a {arity}-vector",
                )
        elif self.at_punct("("):
            if arity is not None and arity == 1:
                raise DslSyntaxError(
                    "got a vector", vtok.line, vtok.col, expected="a number"
                )
            value = self.vector(arity) if arity is not None else self.vector_any()
        else:
            raise self._fail("a keyframe value")
        self.eat_punct(";")
        return KeyframeDecl(channel, frame, value, loc=(tok.line, tok.col))

    def vector_any(self) -> tuple:
        self.eat_punct("(")
        nums = [self.eat_number().value]
        while self.at_punct(","):
            self.advance()
            nums.append(self.eat_number().value)
        self.eat_punct(")")
        return tuple(nums)


def _keyframe_arity(channel: str | None) -> int | None:
    """Expected component count for a channel, or None when unknown
    (unknown channels fail later, at semantic analysis, with a location)."""
    if channel is None or channel == "position":
        return 3
    try:
        kind = channel_kind(channel)
    except InvalidParam:
        return None
    return {KIND_SCALAR: 1, KIND_VEC3: 3, KIND_QUAT: 4}.get(kind)


def parse_script(text: str) -> Script:
    """Syntax only: text to AST. Raises DslSyntaxError with line/col."""
    return _Parser(_lex(text)).script()


# --- printer -----------------------------------------------------------------


def _num(x: Any) -> str:
    return repr(x)


def _vec(v: tuple) -> str:
    return "(" + ", ".join(_num(x) for x in v) + ")"


def _qstr(s: str) -> str:
    return json.dumps(s)


def print_script(script: Script) -> str:
    """AST back to canonical text; parse_script(print_script(ast)) == ast."""
    lines: list[str] = []
    if script.scene is not None:
        sc = script.scene
        lines.append("scene {")
        if sc.rate is not None:
            lines.append(f"  rate {sc.rate};")
        for o in sc.objects:
            fields: list[str] = []
            if o.name is not None:
                fields.append(f"name = {_qstr(o.name)};")
            if o.position is not None:
                fields.append(f"position = {_vec(o.position)};")
            if o.rotation is not None:
                fields.append(f"rotation = {_vec(o.rotation)};")
            if o.scale is not None:
                fields.append(f"scale = {_vec(o.scale)};")
            if o.states:
                fields.append(f"states = [{', '.join(o.states)}];")
            if o.state is not None:
                fields.append(f"state = {o.state};")
            if o.text is not None:
                fields.append(f"text = {_qstr(o.text)};")
            if not fields:
                lines.append(f"  {o.cls} {_qstr(o.id)};")
            else:
                lines.append(f"  {o.cls} {_qstr(o.id)} {{")
                lines.extend(f"    {f}" for f in fields)
                lines.append("  }")
        for w in sc.walls:
            lines.append(f"  wall {_vec(w.a)} -> {_vec(w.b)};")
        for r in sc.regions:
            verts = " ".join(_vec(v) for v in r.vertices)
            lines.append(f"  region {_qstr(r.name)} polygon {verts};")
        for s in sc.spawns:
            lines.append(f"  spawn {_qstr(s.name)} {_vec(s.point)};")
        for a in sc.attaches:
            lines.append(
                f"  attach {_qstr(a.child)} to {_qstr(a.parent)} anchor {_qstr(a.anchor)};"
            )
        lines.append("}")
    for tr in script.tracks:
        flags = ("" if not tr.muted else " muted") + ("" if not tr.locked else " locked")
        lines.append(f"track {_qstr(tr.name)}{flags} {{")
        for sl in tr.slots:
            lines.append(f"  slot [{sl.start}, {sl.end}] {{")
            for e in sl.effects:
                head = f"    effect {e.type} target={_qstr(e.target)}"
                if not e.params and not e.statements:
                    lines.append(head + ";")
                    continue
                lines.append(head + " {")
                for p in e.params:
                    lines.append(f"      {p.key} = {_param(p.value)};")
                for st in e.statements:
                    lines.append(f"      {_statement(st)}")
                lines.append("    }")
            lines.append("  }")
        lines.append("}")
    return "\n".join(lines) + ("\n" if lines else "")


def _param(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return _num(value)
    return _qstr(value)


def _statement(st: Any) -> str:
    if isinstance(st, KeyframeDecl):
        chan = f"{st.channel} " if st.channel is not None else ""
        value = _num(st.value) if not isinstance(st.value, tuple) else _vec(st.value)
        return f"keyframe {chan}{st.frame} => {value};"
    if isinstance(st, EventDecl):
        return f"event {st.frame} => {st.state};"
    if isinstance(st, GrabDecl):
        return f"grab {st.frame} => {_qstr(st.parent)}.{st.anchor};"
    return f"release {st.frame};"


# --- semantic build ------------------------------------------------------------


def _wrap(exc: EngineError, loc: tuple[int, int], other=None) -> DslSemanticError:
    return DslSemanticError(str(exc), loc[0], loc[1], cause_code=exc.code, other=other)


def build_project(script: Script) -> Project:
    """AST to a validated project; constraint failures cite script locations."""
    project = Project()
    if script.scene is not None:
        _build_scene(project, script.scene)
    slot_locs: dict[str, tuple[int, int]] = {}
    grab_queue: list[tuple[int, int, Any, Any, Any]] = []
    lock_later: list[str] = []
    for tr in script.tracks:
        track = project.create_track(name=tr.name)
        if tr.muted:
            project.set_track_flags(track.id, muted=True)
        if tr.locked:
            lock_later.append(track.id)
        for sl in tr.slots:
            try:
                slot = project.create_slot(track.id, sl.start, sl.end)
            except OverlapRejected as exc:
                raise _wrap(exc, sl.loc, other=slot_locs.get(exc.conflicting_slot)) from None
            except EngineError as exc:
                raise _wrap(exc, sl.loc) from None
            slot_locs[slot.id] = sl.loc
            for ed in sl.effects:
                _build_effect(project, slot, ed, grab_queue)
    # carried-prop statements resolve against played state, in frame order
    for frame, _, node, effect, slot in sorted(grab_queue, key=lambda g: (g[0], g[1])):
        try:
            if isinstance(node, GrabDecl):
                write_grab_keyframes(project, effect, frame, node.parent, node.anchor)
            else:
                write_release_keyframes(project, effect, slot.start, frame)
        except EngineError as exc:
            raise _wrap(exc, node.loc) from None
        project.bump()
    for track_id in lock_later:
        project.set_track_flags(track_id, locked=True)
    violations = project.validate()
    if violations:
        raise DslSemanticError("; ".join(violations), 0, 0)
    return project


def _build_scene(project: Project, sc: SceneDecl) -> None:
    if sc.rate is not None:
        if sc.rate <= 0:
            raise DslSemanticError("frame rate must be positive", *sc.loc)
        project.frame_rate = sc.rate
    for o in sc.objects:
        initial = Transform(
            position=tuple(float(x) for x in o.position) if o.position else (0.0, 0.0, 0.0),
            rotation=tuple(float(x) for x in o.rotation) if o.rotation else (1.0, 0.0, 0.0, 0.0),
            scale=tuple(float(x) for x in o.scale) if o.scale else (1.0, 1.0, 1.0),
        )
        obj = ControllableObject(
            id=o.id,
            name=o.name if o.name is not None else o.id,
            cls=ObjectClass(o.cls),
            initial=initial,
            triggerable=bool(o.states),
            states=o.states,
            initial_state=o.state,
            payload=o.text,
        )
        try:
            project.register_object(obj)
        except EngineError as exc:
            raise _wrap(exc, o.loc) from None
    for w in sc.walls:
        try:
            project.scene.floor_plan.add_wall(
                tuple(float(x) for x in w.a), tuple(float(x) for x in w.b)
            )
        except EngineError as exc:
            raise _wrap(exc, w.loc) from None
    for r in sc.regions:
        try:
            project.scene.floor_plan.add_region(
                r.name, [tuple(float(x) for x in v) for v in r.vertices]
            )
        except EngineError as exc:
            raise _wrap(exc, r.loc) from None
    for s in sc.spawns:
        project.scene.floor_plan.add_spawn(s.name, tuple(float(x) for x in s.point))
    for a in sc.attaches:
        try:
            project.attach_object(a.child, a.parent, a.anchor)
        except EngineError as exc:
            raise _wrap(exc, a.loc) from None
    project.bump()


_POSITION_SUGAR = ("position.x", "position.y", "position.z")


def _build_effect(project: Project, slot, ed: EffectDecl, grab_queue: list) -> None:
    params: dict[str, Any] = {}
    for p in ed.params:
        if p.key in params:
            raise DslSemanticError(f"parameter {p.key!r} set twice", *p.loc)
        params[p.key] = p.value
    try:
        effect = project.attach_effect(slot.id, ed.type, ed.target, params)
    except EngineError as exc:
        raise _wrap(exc, ed.loc) from None
    for st in ed.statements:
        if st.frame < 0:
            raise DslSemanticError("negative frame", *st.loc)
        if isinstance(st, KeyframeDecl):
            _build_keyframe(effect, st)
        elif isinstance(st, EventDecl):
            target = project.scene.get(ed.target)
            try:
                effect.record_event(st.frame, st.state, target.states)
            except EngineError as exc:
                raise _wrap(exc, st.loc) from None
        else:
            grab_queue.append((st.frame, len(grab_queue), st, effect, slot))
    project.bump()


def _build_keyframe(effect, st: KeyframeDecl) -> None:
    channel = st.channel if st.channel is not None else "position"
    try:
        if channel == "position":
            for name, value in zip(_POSITION_SUGAR, st.value):
                effect.channel(name).set_sample(st.frame, float(value))
            return
        kind = channel_kind(channel)
        if kind == KIND_SCALAR:
            value: Any = float(st.value)
        elif kind == KIND_QUAT:
            value = tuple(float(x) for x in st.value)
            if not q_is_unit(value):
                raise DslSemanticError("rotation keyframes must be unit quaternions", *st.loc)
        elif kind == KIND_VEC3:
            value = tuple(float(x) for x in st.value)
        else:
            raise DslSemanticError(
                f"channel {channel!r} cannot be keyframed here", *st.loc
            )
        effect.channel(channel).set_sample(st.frame, value)
    except DslSemanticError:
        raise
    except EngineError as exc:
        raise _wrap(exc, st.loc) from None


def parse_scenario(text: str) -> Project:
    """Script text to a fully validated project."""
    return build_project(parse_script(text))
