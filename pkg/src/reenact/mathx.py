"""Small vector/quaternion/transform toolkit.

Everything here works on plain tuples so the playback scan stays allocation
light and bit-deterministic. Quaternions are (w, x, y, z), unit norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

Vec3 = tuple[float, float, float]
Quat = tuple[float, float, float, float]
Vec2 = tuple[float, float]

QUAT_IDENTITY: Quat = (1.0, 0.0, 0.0, 0.0)
VEC3_ZERO: Vec3 = (0.0, 0.0, 0.0)
VEC3_ONE: Vec3 = (1.0, 1.0, 1.0)

UNIT_NORM_TOLERANCE = 1e-9


def v_add(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def v_sub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def v_scale(a: Vec3, s: float) -> Vec3:
    return (a[0] * s, a[1] * s, a[2] * s)


def v_mul(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] * b[0], a[1] * b[1], a[2] * b[2])


def v_dot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def v_norm(a: Vec3) -> float:
    return math.sqrt(v_dot(a, a))


def v_lerp(a: Vec3, b: Vec3, t: float) -> Vec3:
    if t <= 0.0:
        return a
    if t >= 1.0:
        return b
    return (
        a[0] + (b[0] - a[0]) * t,
        a[1] + (b[1] - a[1]) * t,
        a[2] + (b[2] - a[2]) * t,
    )


def lerp(a: float, b: float, t: float) -> float:
    if t <= 0.0:
        return a
    if t >= 1.0:
        return b
    return a + (b - a) * t


# --- quaternions ---------------------------------------------------------


def q_norm(q: Quat) -> float:
    return math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])


def q_normalize(q: Quat) -> Quat:
    n = q_norm(q)
    if n == 0.0:
        return QUAT_IDENTITY
    return (q[0] / n, q[1] / n, q[2] / n, q[3] / n)


def q_is_unit(q: Quat, tol: float = UNIT_NORM_TOLERANCE) -> bool:
    return abs(q_norm(q) - 1.0) <= tol


def q_mul(a: Quat, b: Quat) -> Quat:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def q_conj(q: Quat) -> Quat:
    return (q[0], -q[1], -q[2], -q[3])


def q_rotate(q: Quat, v: Vec3) -> Vec3:
    # v' = q * (0, v) * q^-1, expanded for unit q
    w, x, y, z = q
    vx, vy, vz = v
    tx = 2.0 * (y * vz - z * vy)
    ty = 2.0 * (z * vx - x * vz)
    tz = 2.0 * (x * vy - y * vx)
    return (
        vx + w * tx + (y * tz - z * ty),
        vy + w * ty + (z * tx - x * tz),
        vz + w * tz + (x * ty - y * tx),
    )


def q_from_axis_angle(axis: Vec3, radians: float) -> Quat:
    n = v_norm(axis)
    if n == 0.0:
        return QUAT_IDENTITY
    half = radians * 0.5
    s = math.sin(half) / n
    return (math.cos(half), axis[0] * s, axis[1] * s, axis[2] * s)


def q_from_yaw_deg(yaw_deg: float) -> Quat:
    """Rotation about +y; yaw 0 faces +x in this codebase's convention."""
    return q_from_axis_angle((0.0, 1.0, 0.0), math.radians(yaw_deg))


def q_slerp(a: Quat, b: Quat, t: float) -> Quat:
    """Shortest-path spherical interpolation; exact at the endpoints."""
    if t <= 0.0:
        return a
    if t >= 1.0:
        return b
    dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
    if dot < 0.0:
        b = (-b[0], -b[1], -b[2], -b[3])
        dot = -dot
    if dot > 0.9995:
        # nearly parallel: linear blend avoids a degenerate sin() divisor
        out = (
            a[0] + (b[0] - a[0]) * t,
            a[1] + (b[1] - a[1]) * t,
            a[2] + (b[2] - a[2]) * t,
            a[3] + (b[3] - a[3]) * t,
        )
        return q_normalize(out)
    theta = math.acos(min(1.0, dot))
    sin_theta = math.sin(theta)
    wa = math.sin((1.0 - t) * theta) / sin_theta
    wb = math.sin(t * theta) / sin_theta
    return (
        wa * a[0] + wb * b[0],
        wa * a[1] + wb * b[1],
        wa * a[2] + wb * b[2],
        wa * a[3] + wb * b[3],
    )


# --- transforms ----------------------------------------------------------


@dataclass(frozen=True)
class Transform:
    """Position, unit rotation and per-axis positive scale."""

    position: Vec3 = VEC3_ZERO
    rotation: Quat = QUAT_IDENTITY
    scale: Vec3 = VEC3_ONE

    def apply(self, point: Vec3) -> Vec3:
        return v_add(self.position, q_rotate(self.rotation, v_mul(self.scale, point)))


TRANSFORM_IDENTITY = Transform()


def t_compose(parent: Transform, child: Transform) -> Transform:
    """World transform of `child` expressed relative to `parent`."""
    return Transform(
        position=parent.apply(child.position),
        rotation=q_mul(parent.rotation, child.rotation),
        scale=v_mul(parent.scale, child.scale),
    )


def t_inverse(t: Transform) -> Transform:
    # exact only for uniform scale; the engine inverts anchor transforms,
    # which are rigid (scale 1), so that is the supported case
    inv_scale = (1.0 / t.scale[0], 1.0 / t.scale[1], 1.0 / t.scale[2])
    inv_rot = q_conj(t.rotation)
    inv_pos = v_mul(inv_scale, q_rotate(inv_rot, v_scale(t.position, -1.0)))
    return Transform(position=inv_pos, rotation=inv_rot, scale=inv_scale)


def t_relative(parent: Transform, world: Transform) -> Transform:
    """Local transform such that compose(parent, local) == world."""
    return t_compose(t_inverse(parent), world)


# --- 2D geometry (floor plane) -------------------------------------------


def seg_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> float | None:
    """Parameter t along p1->p2 of the first crossing with q1->q2, else None.

    Collinear overlaps report the earliest touching parameter.
    """
    rx, ry = p2[0] - p1[0], p2[1] - p1[1]
    sx, sy = q2[0] - q1[0], q2[1] - q1[1]
    denom = rx * sy - ry * sx
    qpx, qpy = q1[0] - p1[0], q1[1] - p1[1]
    if denom == 0.0:
        if qpx * ry - qpy * rx != 0.0:
            return None  # parallel, non collinear
        rr = rx * rx + ry * ry
        if rr == 0.0:
            return None
        t0 = (qpx * rx + qpy * ry) / rr
        t1 = t0 + (sx * rx + sy * ry) / rr
        lo, hi = min(t0, t1), max(t0, t1)
        if hi < 0.0 or lo > 1.0:
            return None
        return max(lo, 0.0)
    t = (qpx * sy - qpy * sx) / denom
    u = (qpx * ry - qpy * rx) / denom
    if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
        return t
    return None


def point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    dd = dx * dx + dy * dy
    if dd == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / dd
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def polygon_is_simple(points: list[Vec2]) -> bool:
    """True when no two non-adjacent edges of the closed polygon cross."""
    n = len(points)
    if n < 3:
        return False
    edges = [(points[i], points[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j == (i + 1) % n) or ((j + 1) % n) == i:
                continue
            if seg_intersect(edges[i][0], edges[i][1], edges[j][0], edges[j][1]) is not None:
                return False
    return True


def point_in_polygon(p: Vec2, points: list[Vec2]) -> bool:
    inside = False
    n = len(points)
    px, py = p
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            xt = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < xt:
                inside = not inside
    return inside
