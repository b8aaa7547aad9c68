"""Exact 2D convex geometry over Fractions.

Used for repeated-game feasible sets: convex hulls of payoff points,
axis-aligned halfplane clips, membership tests, and vertex argmaxima.
Points are (u, v) tuples of Fractions.  Hulls are vertex lists in
counterclockwise order with no collinear vertices; a hull may degenerate
to two points (a segment), one point, or the empty list.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence, Tuple

Point = Tuple[Fraction, Fraction]


def cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Sequence[Point]) -> list:
    """Strict convex hull, ccw, collinear interior points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return hull[:1]
    return hull


def _on_segment(a: Point, b: Point, p: Point) -> bool:
    if cross(a, b, p) != 0:
        return False
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def hull_contains(hull: Sequence[Point], p: Point) -> bool:
    """Membership in the closed convex region spanned by the hull."""
    n = len(hull)
    if n == 0:
        return False
    if n == 1:
        return hull[0] == p
    if n == 2:
        return _on_segment(hull[0], hull[1], p)
    for k in range(n):
        if cross(hull[k], hull[(k + 1) % n], p) < 0:
            return False
    return True


def clip_ge(hull: Sequence[Point], axis: int, bound: Fraction) -> list:
    """Intersect the hull region with the halfplane coord[axis] >= bound."""
    n = len(hull)
    if n == 0:
        return []
    kept = [p for p in hull if p[axis] >= bound]
    if len(kept) == n:
        return list(hull)
    cuts = []
    if n >= 2:
        for k in range(n):
            a = hull[k]
            b = hull[(k + 1) % n]
            da = a[axis] - bound
            db = b[axis] - bound
            if (da > 0 > db) or (da < 0 < db):
                t = da / (da - db)
                cuts.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
    return convex_hull(kept + cuts)


def vertex_argmax(hull: Sequence[Point], key: Callable[[Point], object]) -> Point:
    """Vertex maximizing the key; linear objectives peak at a vertex."""
    if not hull:
        raise ValueError("empty region")
    return max(hull, key=key)
