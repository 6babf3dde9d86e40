"""Command line: validate, play, analyze, parse, and serve.

Exit codes follow the usual convention: 0 success, 1 I/O trouble,
2 invalid or failed-validation data, 64 usage errors.
"""

from __future__ import annotations

import argparse
import csv
import os
import re
import sys
from pathlib import Path

from .analytics import (
    density_map,
    find_clusters,
    gaze_arc,
    path_compare,
    render_svg,
)
from .dsl import parse_scenario
from .errors import (
    EngineError,
    MalformedFile,
    NoSamplesInRadius,
    PortInUse,
    ValidationFailed,
)
from .persistence import (
    FORMAT_ROWS,
    FORMAT_STRUCTURED,
    load_project,
    read_telemetry,
    save_project,
    write_trace,
)
from .playback import export_trace
from .project import Project
from .service import DEFAULT_PORT, PORT_ENV_VAR, serve

EXIT_OK = 0
EXIT_IO = 1
EXIT_DATA = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse with BSD-style usage exits (64, not 2)."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_project_file(path: str) -> Project:
    data = Path(path).read_bytes()
    if path.endswith(".crimescn"):
        return parse_scenario(data.decode("utf-8"))
    return load_project(data)


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


# --- validate -----------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        project = _load_project_file(args.project)
    except ValidationFailed as exc:
        for line in exc.violations:
            print(line)
        return EXIT_DATA
    violations = project.validate()
    if violations:
        for line in violations:
            print(line)
        return EXIT_DATA
    print(f"ok: {len(project.scene.objects)} objects, "
          f"{len(project.timeline.tracks)} tracks, {project.duration} frames")
    return EXIT_OK


# --- play ---------------------------------------------------------------------


def cmd_play(args: argparse.Namespace) -> int:
    project = _load_project_file(args.project)
    start = args.start
    end = project.duration if args.end is None else args.end
    if args.stride < 1 or start < 0 or end < start or end > project.duration:
        return _usage_error(
            f"bad range [{start}, {end}] stride {args.stride} "
            f"(project spans [0, {project.duration}])"
        )
    states = export_trace(project, start, end)[:: args.stride]
    data = write_trace(states, format=args.fmt)
    summary = sys.stdout if args.out else sys.stderr
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    print(f"duration: {project.duration} frames (rate {project.frame_rate})",
          file=summary)
    print(f"states: {len(states)}", file=summary)
    return EXIT_OK


# --- analyze ------------------------------------------------------------------


def _collect_telemetry_files(inputs: list[str]) -> list[Path]:
    files: list[Path] = []
    for raw in inputs:
        path = Path(raw)
        if path.is_dir():
            files.extend(sorted(path.glob("*.csv")))
        else:
            if not path.exists():
                raise FileNotFoundError(f"no such file: {path}")
            files.append(path)
    return files


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name) or "task"


def _reference_from_trace(path: str, object_id: str) -> list[tuple[float, float]]:
    """Ground path of one object from a trace CSV (ground plane = x, z)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        if "object" not in fields or "pos_x" not in fields or "pos_z" not in fields:
            raise MalformedFile(f"{path}: not a trace file")
        points: list[tuple[float, float]] = []
        for row in reader:
            if row["object"] != object_id:
                continue
            point = (float(row["pos_x"]), float(row["pos_z"]))
            if not points or points[-1] != point:
                points.append(point)
    if not points:
        raise MalformedFile(f"{path}: no rows for object {object_id!r}")
    return points


def cmd_analyze(args: argparse.Namespace) -> int:
    if not (args.map or args.arcs or args.paths):
        return _usage_error("nothing to do: pass --map, --arcs, and/or --paths")
    if args.paths and (not args.reference or not args.reference_object):
        return _usage_error("--paths needs --reference and --reference-object")

    files = _collect_telemetry_files(args.inputs)
    streams = []
    for path in files:
        streams.extend(read_telemetry(str(path)))
    if args.task is not None:
        streams = [s for s in streams if s.task == args.task]
    if not streams:
        print("error: no telemetry found", file=sys.stderr)
        return EXIT_DATA

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    tasks: dict[str, list] = {}
    for stream in streams:
        tasks.setdefault(stream.task, []).append(stream)

    for task, group in tasks.items():
        tag = _safe_name(task)
        if args.map or args.arcs:
            grid = density_map(group)
        if args.map:
            target = out_dir / f"density_{tag}.svg"
            target.write_bytes(render_svg(grid))
            written.append(target)
        if args.arcs:
            centers = find_clusters(grid, args.clusters)
            arcs = []
            for center in centers:
                try:
                    arcs.append(gaze_arc(group, center))
                except NoSamplesInRadius:
                    continue
            if arcs:
                target = out_dir / f"arcs_{tag}.svg"
                target.write_bytes(render_svg(arcs))
                written.append(target)

    if args.paths:
        reference = _reference_from_trace(args.reference, args.reference_object)
        multi_task = len(tasks) > 1
        rows = []
        drawing: dict[str, list[tuple[float, float]]] = {}
        for stream in streams:
            candidate = [(s.position[0], s.position[1]) for s in stream.samples]
            comp = path_compare(candidate, reference)
            rows.append(
                (
                    stream.participant,
                    stream.task,
                    f"{comp.mean_distance:.6f}",
                    f"{comp.max_deviation:.6f}",
                    f"{comp.frechet:.6f}",
                )
            )
            label = (
                f"{stream.participant}:{stream.task}" if multi_task else stream.participant
            )
            drawing[label] = candidate
        target = out_dir / "paths.csv"
        with open(target, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ("participant", "task", "mean_distance", "max_deviation", "frechet")
            )
            writer.writerows(rows)
        written.append(target)
        drawing["reference"] = reference
        target = out_dir / "paths.svg"
        target.write_bytes(render_svg(drawing, style={"reference": "reference"}))
        written.append(target)

    for path in written:
        print(path)
    return EXIT_OK


# --- parse --------------------------------------------------------------------


def cmd_parse(args: argparse.Namespace) -> int:
    text = Path(args.script).read_text(encoding="utf-8")
    project = parse_scenario(text)
    out = args.out or str(Path(args.script).with_suffix(".crimeproj"))
    data = save_project(project)
    Path(out).write_bytes(data)
    print(f"{out}: {len(project.scene.objects)} objects, "
          f"{len(project.timeline.tracks)} tracks, {project.duration} frames")
    return EXIT_OK


# --- serve --------------------------------------------------------------------


def cmd_serve(args: argparse.Namespace) -> int:
    port = args.port
    if port is None:
        port = int(os.environ.get(PORT_ENV_VAR, str(DEFAULT_PORT)))
    print(f"session service on http://{args.host}:{port}", flush=True)
    try:
        serve(port=port, host=args.host, project_path=args.project)
    except KeyboardInterrupt:
        pass
    return EXIT_OK


# --- wiring -------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(
        prog="reenact",
        description="Deterministic incident-scene sequencing engine.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("validate", help="load a project and report invariant breaches")
    p.add_argument("project", help="project file (.crimeproj) or script (.crimescn)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("play", help="resolve frames and write a trace")
    p.add_argument("project", help="project file (.crimeproj) or script (.crimescn)")
    p.add_argument("--from", dest="start", type=int, default=0, metavar="FRAME")
    p.add_argument("--to", dest="end", type=int, default=None, metavar="FRAME")
    p.add_argument("--stride", type=int, default=1, metavar="N")
    p.add_argument(
        "--fmt", choices=(FORMAT_ROWS, FORMAT_STRUCTURED), default=FORMAT_ROWS
    )
    p.add_argument(
        "--out",
        default=None,
        help="trace destination (default: stdout, summary moves to stderr)",
    )
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("analyze", help="batch telemetry analytics to SVG/CSV")
    p.add_argument("inputs", nargs="+", help="telemetry CSV files or directories")
    p.add_argument("--task", default=None, help="only streams for this task id")
    p.add_argument("--map", action="store_true", help="emit position density maps")
    p.add_argument("--arcs", action="store_true", help="emit cluster gaze arcs")
    p.add_argument(
        "--clusters", type=int, default=3, metavar="K", help="cluster count for --arcs"
    )
    p.add_argument("--paths", action="store_true", help="emit path comparison CSV/SVG")
    p.add_argument(
        "--reference", default=None, metavar="TRACE",
        help="trace CSV supplying the reference path for --paths",
    )
    p.add_argument(
        "--reference-object", default=None, metavar="ID",
        help="object id inside the reference trace",
    )
    p.add_argument("--out", default=".", help="output directory (default: .)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("parse", help="compile a scenario script to a project file")
    p.add_argument("script", help="scenario script (.crimescn)")
    p.add_argument("--out", default=None, help="project destination (default: script name)")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("serve", help="run the session service")
    p.add_argument(
        "--port", type=int, default=None,
        help=f"listen port (default: ${PORT_ENV_VAR} or {DEFAULT_PORT})",
    )
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--project", default=None, help="preload this project file")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except PortInUse as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
