"""
Telemetry analytics
===================

Synthesize headset telemetry for a handful of participants walking the
same task, then run the batch analytics: a kernel density map of where
they stood, cluster centers, a gaze arc around the hot spot, and a
Fréchet comparison of each walked path against the intended route.
Everything is seeded, so the numbers below reproduce exactly.
"""

import math
import random

from reenact.analytics import (
    TelemetrySample,
    TelemetryStream,
    density_map,
    find_clusters,
    frechet_distance,
    gaze_arc,
    path_compare,
    render_svg,
)

rng = random.Random(20260816)

# the intended route: west door to the table, then south to the shelf
ROUTE = [(0.0, 0.0), (4.0, 0.0), (4.0, 3.0), (7.0, 3.0)]


def along_route(u):
    """Point u in [0, 1] of the way along the polyline."""
    lengths = [
        math.dist(a, b) for a, b in zip(ROUTE, ROUTE[1:])
    ]
    total = sum(lengths)
    target = u * total
    for (a, b), seg in zip(zip(ROUTE, ROUTE[1:]), lengths):
        if target <= seg or (a, b) == (ROUTE[-2], ROUTE[-1]):
            t = min(1.0, target / seg)
            return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
        target -= seg
    return ROUTE[-1]


streams = []
for participant in ("p01", "p02", "p03", "p04", "p05"):
    samples = []
    for i in range(240):
        u = i / 239
        x, y = along_route(u)
        # individual wobble plus a pause near the table
        x += rng.gauss(0.0, 0.12)
        y += rng.gauss(0.0, 0.12)
        yaw = (math.degrees(math.atan2(3.0 - y, 4.0 - x))) % 360.0
        samples.append(
            TelemetrySample(t=i / 12.0, position=(x, y, 1.7), yaw=yaw, pitch=-12.0)
        )
    streams.append(TelemetryStream(participant=participant, task="route_a", samples=samples))

# --- where did people actually stand -----------------------------------------

grid = density_map(streams, cell=0.25)
print("density integral:", round(grid.integral(), 6), "(1.0 per stream, renormalized)")
print("hottest cell center:", tuple(round(c, 2) for c in grid.argmax_center()))

for i, center in enumerate(find_clusters(grid, 2), 1):
    print(f"cluster {i}:", tuple(round(c, 2) for c in center))

# --- which way they faced near the table -------------------------------------

arc = gaze_arc(streams, center=(4.0, 3.0), radius=1.5)
busiest = max(range(36), key=lambda b: arc.histogram[b])
print(
    f"gaze arc: {arc.sample_count} samples in radius,"
    f" {arc.outliers_removed} outliers removed,"
    f" busiest sector {busiest * 10}..{busiest * 10 + 10} deg"
)

# --- how close each walk stayed to the route ----------------------------------

# discrete Frechet couples vertex to vertex, so sample the route as densely
# as the walks before comparing
reference = [along_route(i / 239) for i in range(240)]

for stream in streams:
    walked = [(s.position[0], s.position[1]) for s in stream.samples]
    d = frechet_distance(walked, reference)
    print(f"{stream.participant}: frechet vs route = {d:.3f} m")

report = path_compare(
    [(s.position[0], s.position[1]) for s in streams[0].samples], reference
)
print(
    f"p01 detail: mean {report.mean_distance:.3f} m,"
    f" max {report.max_deviation:.3f} m, frechet {report.frechet:.3f} m"
)

svg = render_svg(grid)
print("density map SVG:", len(svg), "bytes")
