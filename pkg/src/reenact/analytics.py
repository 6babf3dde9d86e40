"""Observer-telemetry analytics: density maps, gaze arcs, path metrics.

Everything here is a pure function over immutable telemetry streams.
Ground-plane convention: a telemetry position is (x, y, height), so all
maps, clusters, and paths live in the (x, y) plane with distances in
metres. Heading yaw is degrees counterclockwise from +x in [0, 360);
pitch is degrees above the horizon (negative looks down).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    EmptyInput,
    EmptyPath,
    InvalidParam,
    NoIntersection,
    NoSamplesInRadius,
    TooFewSamples,
)
from .persistence import TelemetrySample, TelemetryStream
from .scene import FloorPlan

Point2 = tuple[float, float]

DEFAULT_CELL = 0.1  # metres per grid cell
DEFAULT_MIN_SEPARATION = 1.0  # metres between cluster centers
GAZE_ARC_RADIUS = 0.5  # metres around a cluster center
GAZE_BIN_COUNT = 36  # 10 degree angular bins
GRID_MARGIN_BANDWIDTHS = 5.0  # auto-grid extent beyond the sample hull


# --- grids ----------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Explicit grid placement for density maps.

    `origin` is the lower-left corner of cell (0, 0); cells are square
    with side `cell`; the grid spans `width` cells along x and `height`
    along y.
    """

    origin: Point2
    cell: float
    width: int
    height: int

    def __post_init__(self):
        if self.cell <= 0:
            raise InvalidParam("grid cell size must be positive")
        if self.width < 1 or self.height < 1:
            raise InvalidParam("grid must have at least one cell per axis")


@dataclass
class DensityGrid:
    """A 2D histogram of kernel mass over the ground plane.

    `weights[iy, ix]` is the probability mass that landed in the cell,
    scaled so the whole array sums to `sample_count` (each contributing
    sample deposits exactly one unit of mass, renormalized against edge
    truncation). The density value of a cell is therefore
    weight / (sample_count * cell**2), and the density integrates to 1.
    """

    origin: Point2
    cell: float
    width: int
    height: int
    weights: np.ndarray  # shape (height, width), float64, non-negative
    sample_count: int

    def total_weight(self) -> float:
        return float(self.weights.sum())

    def integral(self) -> float:
        """Density integral over the grid: (cell-sum x cell-area)."""
        return float(self.density().sum() * self.cell * self.cell)

    def density(self) -> np.ndarray:
        if self.sample_count <= 0:
            return np.zeros_like(self.weights)
        return self.weights / (self.sample_count * self.cell * self.cell)

    def cell_center(self, ix: int, iy: int) -> Point2:
        return (
            self.origin[0] + (ix + 0.5) * self.cell,
            self.origin[1] + (iy + 0.5) * self.cell,
        )

    def argmax_center(self) -> Point2:
        iy, ix = np.unravel_index(int(np.argmax(self.weights)), self.weights.shape)
        return self.cell_center(int(ix), int(iy))


# --- sample plumbing ------------------------------------------------------


def _as_streams(streams) -> list[TelemetryStream]:
    if isinstance(streams, TelemetryStream):
        return [streams]
    return list(streams)


def _all_samples(streams) -> list[TelemetrySample]:
    out: list[TelemetrySample] = []
    for stream in _as_streams(streams):
        out.extend(stream.samples)
    return out


def _ground(sample: TelemetrySample) -> Point2:
    return (sample.position[0], sample.position[1])


# --- duration normalization -----------------------------------------------


def _resample(
    tn: np.ndarray, values: np.ndarray, query: np.ndarray, circular: bool = False
) -> np.ndarray:
    """Piecewise-linear resampling that is exact at the breakpoints.

    `tn` must be non-decreasing and span [0, 1]. For circular values the
    interpolation runs along the shortest angular arc of each segment and
    the result is reduced into [0, 360).
    """
    idx = np.searchsorted(tn, query, side="right") - 1
    idx = np.clip(idx, 0, len(tn) - 2)
    span = tn[idx + 1] - tn[idx]
    frac = np.where(span > 0, (query - tn[idx]) / np.where(span > 0, span, 1.0), 0.0)
    lo = values[idx]
    hi = values[idx + 1]
    if circular:
        delta = np.mod(hi - lo + 180.0, 360.0) - 180.0
        blended = np.mod(lo + frac * delta, 360.0)
    else:
        blended = lo + frac * (hi - lo)
    # Queries landing on a breakpoint must reproduce it bit-exactly.
    return np.where(frac >= 1.0, hi, blended)


def normalize_duration(stream: TelemetryStream, n_samples: int) -> TelemetryStream:
    """Resample a stream to `n_samples` equally spaced normalized times.

    The returned stream's timestamps run 0..1; endpoint samples are
    preserved exactly, so aggregating normalized streams weighs each
    participant equally regardless of how long their task run was.
    Yaw is interpolated circularly; the operation is idempotent at a
    fixed `n_samples`.
    """
    if n_samples < 2:
        raise TooFewSamples(f"cannot resample to {n_samples} samples (need >= 2)")
    if len(stream.samples) < 2:
        raise TooFewSamples(
            f"stream {stream.participant}/{stream.task} has "
            f"{len(stream.samples)} sample(s), need >= 2"
        )
    t = np.array([s.t for s in stream.samples], dtype=np.float64)
    span = t[-1] - t[0]
    if span <= 0:
        raise TooFewSamples("stream spans no time; cannot normalize duration")
    tn = (t - t[0]) / span
    query = np.linspace(0.0, 1.0, n_samples)
    xs = np.array([s.position[0] for s in stream.samples])
    ys = np.array([s.position[1] for s in stream.samples])
    zs = np.array([s.position[2] for s in stream.samples])
    yaws = np.array([s.yaw for s in stream.samples])
    pitches = np.array([s.pitch for s in stream.samples])
    rx = _resample(tn, xs, query)
    ry = _resample(tn, ys, query)
    rz = _resample(tn, zs, query)
    ryaw = _resample(tn, yaws, query, circular=True)
    rpitch = _resample(tn, pitches, query)
    samples = tuple(
        TelemetrySample(
            t=float(query[i]),
            position=(float(rx[i]), float(ry[i]), float(rz[i])),
            yaw=float(ryaw[i]),
            pitch=float(rpitch[i]),
        )
        for i in range(n_samples)
    )
    return TelemetryStream(stream.participant, stream.task, samples)


# --- kernel density -------------------------------------------------------


def scott_bandwidth(points: np.ndarray) -> float:
    """Isotropic Scott's-rule bandwidth: n^(-1/6) times the mean of the
    per-axis standard deviations."""
    n = len(points)
    if n == 0:
        return 0.0
    sx = float(points[:, 0].std())
    sy = float(points[:, 1].std())
    return n ** (-1.0 / 6.0) * (sx + sy) / 2.0


def _auto_grid(points: np.ndarray, bandwidth: float, cell: float) -> GridSpec:
    margin = GRID_MARGIN_BANDWIDTHS * bandwidth
    x0 = float(points[:, 0].min()) - margin
    x1 = float(points[:, 0].max()) + margin
    y0 = float(points[:, 1].min()) - margin
    y1 = float(points[:, 1].max()) + margin
    width = max(1, int(math.ceil((x1 - x0) / cell)))
    height = max(1, int(math.ceil((y1 - y0) / cell)))
    return GridSpec(origin=(x0, y0), cell=cell, width=width, height=height)


def _density_from_points(
    points: np.ndarray,
    bandwidth: float | None,
    grid: GridSpec | None,
    cell: float,
) -> DensityGrid:
    if len(points) == 0:
        raise EmptyInput("no positions to build a density map from")
    if bandwidth is None:
        bandwidth = scott_bandwidth(points)
    if not bandwidth > 0:
        # Degenerate spread (single point or coincident samples): fall
        # back to one cell so the kernel stays well-defined.
        bandwidth = cell if grid is None else grid.cell
    if grid is None:
        grid = _auto_grid(points, bandwidth, cell)
    gx = grid.origin[0] + (np.arange(grid.width) + 0.5) * grid.cell
    gy = grid.origin[1] + (np.arange(grid.height) + 0.5) * grid.cell
    weights = np.zeros((grid.height, grid.width), dtype=np.float64)
    contributing = 0
    inv = 1.0 / (2.0 * bandwidth * bandwidth)
    for sx, sy in points:
        kx = np.exp(-((gx - sx) ** 2) * inv)
        ky = np.exp(-((gy - sy) ** 2) * inv)
        mass = kx.sum() * ky.sum()
        if mass <= 0.0 or not math.isfinite(mass):
            continue  # sample too far off-grid to deposit anything
        weights += np.outer(ky, kx) / mass
        contributing += 1
    if contributing == 0:
        raise EmptyInput("no sample deposits any mass on the grid")
    return DensityGrid(
        origin=grid.origin,
        cell=grid.cell,
        width=grid.width,
        height=grid.height,
        weights=weights,
        sample_count=contributing,
    )


def density_map(
    streams,
    bandwidth: float | None = None,
    grid: GridSpec | None = None,
    cell: float = DEFAULT_CELL,
) -> DensityGrid:
    """Isotropic Gaussian kernel density over ground-plane positions.

    `streams` is one TelemetryStream or an iterable of them; every sample
    pools into one map, so normalize stream durations first when
    participants should contribute equal weight. Bandwidth defaults to
    Scott's rule; the grid defaults to the sample bounding box padded by
    five bandwidths at `cell` resolution. Each sample's kernel mass is
    renormalized over the grid, so the density integral stays at 1 even
    near the grid edge.
    """
    samples = _all_samples(streams)
    if not samples:
        raise EmptyInput("no telemetry samples")
    points = np.array([_ground(s) for s in samples], dtype=np.float64)
    return _density_from_points(points, bandwidth, grid, cell)


# --- gaze rays ------------------------------------------------------------


def gaze_hit(sample: TelemetrySample, floor_plan: FloorPlan | None = None) -> Point2:
    """Ground-plane point the sample's gaze ray lands on.

    The ray starts at the sample's 3D position and points along its yaw
    and pitch. It stops at the first wall of the floor plan (walls are
    treated as full-height) or, failing that, where it meets the ground
    plane. Raises NoIntersection when it meets neither (for example a
    level gaze across an open plan).
    """
    yaw_r = math.radians(sample.yaw)
    pitch_r = math.radians(sample.pitch)
    dx = math.cos(pitch_r) * math.cos(yaw_r)
    dy = math.cos(pitch_r) * math.sin(yaw_r)
    dz = math.sin(pitch_r)
    px, py, pz = sample.position

    # Distance along the 2D shadow of the ray to the ground-plane hit.
    ground_s: float | None = None
    h2d = math.hypot(dx, dy)
    if dz != 0.0:
        t3 = -pz / dz
        if t3 >= 0.0:
            ground_s = t3 * h2d
    if h2d < 1e-15:
        # Looking straight up or down: no wall can be hit.
        if ground_s is not None:
            return (px, py)
        raise NoIntersection("gaze ray never reaches the ground")

    ux, uy = dx / h2d, dy / h2d
    wall_s: float | None = None
    wall_pt: Point2 | None = None
    if floor_plan is not None:
        for wall in floor_plan.walls:
            ax, ay = wall.a
            bx, by = wall.b
            ex, ey = bx - ax, by - ay
            denom = ux * ey - uy * ex
            if abs(denom) < 1e-15:
                continue  # parallel to the wall
            s = ((ax - px) * ey - (ay - py) * ex) / denom
            u = ((ax - px) * uy - (ay - py) * ux) / denom
            if s > 1e-12 and 0.0 <= u <= 1.0 and (wall_s is None or s < wall_s):
                wall_s = s
                wall_pt = (px + s * ux, py + s * uy)
    if wall_s is not None and (ground_s is None or wall_s < ground_s):
        assert wall_pt is not None
        return wall_pt
    if ground_s is not None:
        return (px + ground_s * ux, py + ground_s * uy)
    raise NoIntersection("gaze ray leaves the scene without touching it")


@dataclass(frozen=True)
class GazeHitMap:
    grid: DensityGrid
    hits: tuple[Point2, ...]
    skipped: int  # rays that intersected neither ground nor wall


def gaze_hit_map(
    streams,
    floor_plan: FloorPlan | None = None,
    bandwidth: float | None = None,
    grid: GridSpec | None = None,
    cell: float = DEFAULT_CELL,
) -> GazeHitMap:
    """Top-down density of where gaze rays land in the scene.

    Every sample's ray is intersected per `gaze_hit`; rays that miss are
    skipped and counted in `skipped`. The surviving hit points feed the
    same kernel-density estimate as `density_map`.
    """
    samples = _all_samples(streams)
    if not samples:
        raise EmptyInput("no telemetry samples")
    hits: list[Point2] = []
    skipped = 0
    for sample in samples:
        try:
            hits.append(gaze_hit(sample, floor_plan))
        except NoIntersection:
            skipped += 1
    if not hits:
        raise EmptyInput("every gaze ray missed the scene")
    points = np.array(hits, dtype=np.float64)
    density = _density_from_points(points, bandwidth, grid, cell)
    return GazeHitMap(grid=density, hits=tuple(hits), skipped=skipped)


# --- clusters -------------------------------------------------------------


def find_clusters(
    grid: DensityGrid, k: int, min_separation: float = DEFAULT_MIN_SEPARATION
) -> list[Point2]:
    """Top-k density peaks, greedily kept in descending density.

    A peak is a cell with positive weight that is >= all of its eight
    neighbours. Candidates are visited in order of (density desc, then
    lower (x, y) lexicographic for exact ties) and kept while at least
    `min_separation` metres from every already-kept center. Fewer peaks
    than k yields a shorter list.
    """
    if k < 1:
        raise InvalidParam("k must be >= 1")
    w = grid.weights
    padded = np.full((w.shape[0] + 2, w.shape[1] + 2), -np.inf)
    padded[1:-1, 1:-1] = w
    neighbour_max = np.full_like(w, -np.inf)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            shifted = padded[1 + dy : 1 + dy + w.shape[0], 1 + dx : 1 + dx + w.shape[1]]
            neighbour_max = np.maximum(neighbour_max, shifted)
    is_peak = (w > 0) & (w >= neighbour_max)
    candidates = []
    for iy, ix in zip(*np.nonzero(is_peak)):
        x, y = grid.cell_center(int(ix), int(iy))
        candidates.append((-float(w[iy, ix]), x, y))
    candidates.sort()
    centers: list[Point2] = []
    for _, x, y in candidates:
        if len(centers) >= k:
            break
        if all(math.hypot(x - cx, y - cy) >= min_separation for cx, cy in centers):
            centers.append((x, y))
    return centers


# --- gaze arcs ------------------------------------------------------------


@dataclass(frozen=True)
class GazeArc:
    """Angular histogram of gaze headings near one cluster center.

    `histogram` has 36 bins of 10 degrees starting at [0, 10); it sums to
    `sample_count`, the number of in-radius samples that survived outlier
    removal. `outliers_removed` counts in-radius samples dropped by the
    IQR rule, so histogram total + outliers_removed + out-of-radius
    samples equals the input total.
    """

    center: Point2
    radius: float
    histogram: tuple[int, ...]
    sample_count: int
    outliers_removed: int


def circular_median(angles_deg: Sequence[float]) -> float:
    """Angle among the inputs minimizing total circular deviation.

    Candidates are the input angles themselves; ties pick the smallest
    angle. Degrees in, degrees out.
    """
    if len(angles_deg) == 0:
        raise EmptyInput("no angles")
    arr = np.asarray(angles_deg, dtype=np.float64)
    best = None
    for cand in sorted(set(float(a) for a in arr)):
        dev = np.abs(np.mod(arr - cand + 180.0, 360.0) - 180.0)
        cost = float(dev.sum())
        if best is None or cost < best[0] - 1e-12:
            best = (cost, cand)
    assert best is not None
    return best[1]


def gaze_arc(
    streams, center: Point2, radius: float = GAZE_ARC_RADIUS
) -> GazeArc:
    """Angular gaze histogram for samples within `radius` of `center`.

    In-radius selection is inclusive on the boundary. Yaw outliers are
    removed before binning: deviations are measured from the circular
    median into [-180, 180), and samples outside
    [Q1 - 1.5 IQR, Q3 + 1.5 IQR] of those deviations (linear-interpolated
    quartiles) are dropped. The survivors bin into 36 bins of 10 degrees.
    """
    if radius <= 0:
        raise InvalidParam("radius must be positive")
    samples = _all_samples(streams)
    cx, cy = center
    in_radius = [
        s for s in samples if math.hypot(s.position[0] - cx, s.position[1] - cy) <= radius
    ]
    if not in_radius:
        raise NoSamplesInRadius(
            f"no samples within {radius} m of ({cx}, {cy})"
        )
    yaws = np.array([s.yaw for s in in_radius], dtype=np.float64)
    median = circular_median(yaws)
    dev = np.mod(yaws - median + 180.0, 360.0) - 180.0
    q1, q3 = np.percentile(dev, [25.0, 75.0])
    iqr = q3 - q1
    keep = (dev >= q1 - 1.5 * iqr) & (dev <= q3 + 1.5 * iqr)
    hist = [0] * GAZE_BIN_COUNT
    for yaw in yaws[keep]:
        hist[int(yaw // 10.0) % GAZE_BIN_COUNT] += 1
    kept = int(keep.sum())
    return GazeArc(
        center=(float(cx), float(cy)),
        radius=float(radius),
        histogram=tuple(hist),
        sample_count=kept,
        outliers_removed=len(in_radius) - kept,
    )


# --- path comparison ------------------------------------------------------


@dataclass(frozen=True)
class PathComparison:
    mean_distance: float
    max_deviation: float
    frechet: float


def _dist(p: Point2, q: Point2) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def _closest_point_distance(p: Point2, path: Sequence[Point2]) -> float:
    if len(path) == 1:
        return _dist(p, path[0])
    best = math.inf
    for a, b in zip(path, path[1:]):
        ax, ay = a
        bx, by = b
        ex, ey = bx - ax, by - ay
        dd = ex * ex + ey * ey
        if dd == 0.0:
            d = _dist(p, a)
        else:
            t = ((p[0] - ax) * ex + (p[1] - ay) * ey) / dd
            t = min(1.0, max(0.0, t))
            d = math.hypot(p[0] - (ax + t * ex), p[1] - (ay + t * ey))
        best = min(best, d)
    return best


def frechet_distance(a: Sequence[Point2], b: Sequence[Point2]) -> float:
    """Discrete Frechet distance between two vertex sequences."""
    if len(a) == 0 or len(b) == 0:
        raise EmptyPath("cannot compare an empty path")
    n, m = len(a), len(b)
    ca = np.zeros((n, m), dtype=np.float64)
    for i in range(n):
        for j in range(m):
            d = _dist(a[i], b[j])
            if i == 0 and j == 0:
                ca[i, j] = d
            elif i == 0:
                ca[i, j] = max(ca[i, j - 1], d)
            elif j == 0:
                ca[i, j] = max(ca[i - 1, j], d)
            else:
                ca[i, j] = max(min(ca[i - 1, j], ca[i - 1, j - 1], ca[i, j - 1]), d)
    return float(ca[n - 1, m - 1])


def path_compare(
    candidate: Sequence[Point2], reference: Sequence[Point2]
) -> PathComparison:
    """How far a candidate path strays from a reference path.

    mean_distance and max_deviation aggregate, over candidate vertices,
    the distance to the nearest point anywhere on the reference polyline;
    frechet is the discrete Frechet distance over the two vertex
    sequences. All three are in metres.
    """
    candidate = [(float(x), float(y)) for x, y in candidate]
    reference = [(float(x), float(y)) for x, y in reference]
    if not candidate or not reference:
        raise EmptyPath("both paths need at least one point")
    dists = [_closest_point_distance(p, reference) for p in candidate]
    return PathComparison(
        mean_distance=sum(dists) / len(dists),
        max_deviation=max(dists),
        frechet=frechet_distance(candidate, reference),
    )


# --- SVG rendering --------------------------------------------------------

_PATH_PALETTE = ("#e6762d", "#7b52ab", "#3f9b4f", "#2b6cb0", "#c53030", "#718096")
_SVG_SCALE = 100.0  # pixels per metre


def _fmt(value: float) -> str:
    out = f"{value:.3f}"
    return "0.000" if out == "-0.000" else out


class _Canvas:
    """Maps ground-plane metres to SVG pixel space (y flipped up)."""

    def __init__(self, x0, y0, x1, y1, pad_m=0.5):
        self.x0, self.y0 = x0 - pad_m, y0 - pad_m
        self.x1, self.y1 = x1 + pad_m, y1 + pad_m
        self.w = (self.x1 - self.x0) * _SVG_SCALE
        self.h = (self.y1 - self.y0) * _SVG_SCALE

    def px(self, x: float) -> float:
        return (x - self.x0) * _SVG_SCALE

    def py(self, y: float) -> float:
        return (self.y1 - y) * _SVG_SCALE

    def open_tag(self) -> str:
        return (
            '<svg xmlns="http://www.w3.org/2000/svg" '
            f'viewBox="0 0 {_fmt(self.w)} {_fmt(self.h)}" '
            f'width="{_fmt(self.w)}" height="{_fmt(self.h)}">'
        )

    def axes(self, x0, y0, x1, y1) -> list[str]:
        lines = [
            f'<rect x="{_fmt(self.px(x0))}" y="{_fmt(self.py(y1))}" '
            f'width="{_fmt((x1 - x0) * _SVG_SCALE)}" '
            f'height="{_fmt((y1 - y0) * _SVG_SCALE)}" '
            'fill="none" stroke="#444444" stroke-width="1.5"/>'
        ]
        for label, x, y, anchor in (
            (f"({x0:g}, {y0:g})", x0, y0, "start"),
            (f"({x1:g}, {y1:g})", x1, y1, "end"),
        ):
            lines.append(
                f'<text x="{_fmt(self.px(x))}" y="{_fmt(self.py(y) + 14.0)}" '
                f'font-family="monospace" font-size="12" fill="#444444" '
                f'text-anchor="{anchor}">{label}</text>'
            )
        return lines


def _svg_density(grid: DensityGrid, style: Mapping) -> bytes:
    x1 = grid.origin[0] + grid.width * grid.cell
    y1 = grid.origin[1] + grid.height * grid.cell
    canvas = _Canvas(grid.origin[0], grid.origin[1], x1, y1)
    body = [canvas.open_tag()]
    peak = float(grid.weights.max()) if grid.weights.size else 0.0
    fill = str(style.get("fill", "#d94801"))
    if peak > 0:
        side = grid.cell * _SVG_SCALE
        for iy in range(grid.height):
            for ix in range(grid.width):
                w = float(grid.weights[iy, ix])
                if w <= 0:
                    continue
                cx, cy = grid.cell_center(ix, iy)
                body.append(
                    f'<rect x="{_fmt(canvas.px(cx - grid.cell / 2))}" '
                    f'y="{_fmt(canvas.py(cy + grid.cell / 2))}" '
                    f'width="{_fmt(side)}" height="{_fmt(side)}" '
                    f'fill="{fill}" fill-opacity="{_fmt(w / peak)}"/>'
                )
    body.extend(canvas.axes(grid.origin[0], grid.origin[1], x1, y1))
    body.append("</svg>")
    return ("\n".join(body) + "\n").encode("utf-8")


def _wedge(canvas: _Canvas, center: Point2, r: float, deg0: float, deg1: float) -> str:
    cx, cy = canvas.px(center[0]), canvas.py(center[1])
    a0, a1 = math.radians(deg0), math.radians(deg1)
    rp = r * _SVG_SCALE
    # Screen y is flipped, so ground-CCW arcs sweep with flag 0.
    x0, y0 = cx + rp * math.cos(a0), cy - rp * math.sin(a0)
    x1, y1 = cx + rp * math.cos(a1), cy - rp * math.sin(a1)
    return (
        f'M {_fmt(cx)} {_fmt(cy)} L {_fmt(x0)} {_fmt(y0)} '
        f'A {_fmt(rp)} {_fmt(rp)} 0 0 0 {_fmt(x1)} {_fmt(y1)} Z'
    )


def _svg_arcs(arcs: Sequence[GazeArc], style: Mapping) -> bytes:
    xs = [a.center[0] for a in arcs]
    ys = [a.center[1] for a in arcs]
    r = max((a.radius for a in arcs), default=GAZE_ARC_RADIUS)
    canvas = _Canvas(min(xs) - r, min(ys) - r, max(xs) + r, max(ys) + r)
    fill = str(style.get("fill", "#2b6cb0"))
    body = [canvas.open_tag()]
    for arc in arcs:
        cx, cy = canvas.px(arc.center[0]), canvas.py(arc.center[1])
        body.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
            f'r="{_fmt(arc.radius * _SVG_SCALE)}" '
            'fill="none" stroke="#888888" stroke-width="1"/>'
        )
        peak = max(arc.histogram) if arc.histogram else 0
        if peak <= 0:
            continue
        for b, count in enumerate(arc.histogram):
            if count <= 0:
                continue
            rb = arc.radius * (count / peak)
            body.append(
                f'<path d="{_wedge(canvas, arc.center, rb, b * 10.0, (b + 1) * 10.0)}" '
                f'fill="{fill}" fill-opacity="0.8"/>'
            )
    body.extend(
        canvas.axes(canvas.x0 + 0.5, canvas.y0 + 0.5, canvas.x1 - 0.5, canvas.y1 - 0.5)
    )
    body.append("</svg>")
    return ("\n".join(body) + "\n").encode("utf-8")


def _svg_paths(paths: Mapping[str, Sequence[Point2]], style: Mapping) -> bytes:
    pts = [(float(x), float(y)) for path in paths.values() for x, y in path]
    if not pts:
        raise EmptyPath("no path points to render")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    canvas = _Canvas(min(xs), min(ys), max(xs), max(ys))
    reference = style.get("reference")
    body = [canvas.open_tag()]
    color_index = 0
    legend: list[tuple[str, str, str]] = []  # (name, colour, dasharray)
    for name, path in paths.items():
        if name == reference:
            colour, widthpx, dash = "#111111", "3", "7 4"
        else:
            colour = _PATH_PALETTE[color_index % len(_PATH_PALETTE)]
            color_index += 1
            widthpx, dash = "2", "none"
        coords = " ".join(
            f"{_fmt(canvas.px(float(x)))},{_fmt(canvas.py(float(y)))}" for x, y in path
        )
        body.append(
            f'<polyline points="{coords}" fill="none" stroke="{colour}" '
            f'stroke-width="{widthpx}" stroke-dasharray="{dash}" '
            'stroke-linejoin="round" stroke-linecap="round"/>'
        )
        legend.append((name, colour, dash))
    for row, (name, colour, dash) in enumerate(legend):
        y = 18.0 + row * 18.0
        body.append(
            f'<line x1="8" y1="{_fmt(y - 4.0)}" x2="36" y2="{_fmt(y - 4.0)}" '
            f'stroke="{colour}" stroke-width="3" stroke-dasharray="{dash}"/>'
        )
        body.append(
            f'<text x="42" y="{_fmt(y)}" font-family="monospace" font-size="12" '
            f'fill="#222222">{name}</text>'
        )
    body.extend(canvas.axes(min(xs), min(ys), max(xs), max(ys)))
    body.append("</svg>")
    return ("\n".join(body) + "\n").encode("utf-8")


def render_svg(subject, style: Mapping | None = None) -> bytes:
    """Deterministic SVG rendering of analytics artifacts.

    Accepts a DensityGrid (opacity-mapped cells), a GazeArc or sequence
    of them (angular wedges inside the sampling circle), or a mapping of
    path name to point list (polylines with a legend; pass
    style={"reference": name} to draw one path as the dashed black
    reference). Identical inputs produce identical bytes.
    """
    style = style or {}
    if isinstance(subject, DensityGrid):
        return _svg_density(subject, style)
    if isinstance(subject, GazeArc):
        return _svg_arcs([subject], style)
    if isinstance(subject, Mapping):
        return _svg_paths(subject, style)
    if isinstance(subject, Iterable):
        arcs = list(subject)
        if arcs and all(isinstance(a, GazeArc) for a in arcs):
            return _svg_arcs(arcs, style)
    raise InvalidParam("render_svg expects a DensityGrid, GazeArc(s), or path mapping")
