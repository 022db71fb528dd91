"""Planar convex-hull helpers for numerical-range sets.

Complex numbers stand in for 2-D points. Degenerate hulls (a single point
or a segment) are first-class so that normal operators and scalar multiples
of the identity need no special casing upstream.
"""

import numpy as np


def convex_hull(points):
    """Extreme points of the convex hull, counterclockwise (monotone chain).

    Returns an array of 1 (point), 2 (segment) or >= 3 (polygon) vertices.
    """
    pts = np.asarray(points, dtype=np.complex128).reshape(-1)
    if pts.size == 0:
        raise ValueError("no points")
    uniq = sorted(set(zip(pts.real, pts.imag)))
    if len(uniq) == 1:
        return np.array([complex(*uniq[0])])

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for q in uniq:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], q) <= 0:
            lower.pop()
        lower.append(q)
    upper = []
    for q in reversed(uniq):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], q) <= 0:
            upper.pop()
        upper.append(q)
    verts = lower[:-1] + upper[:-1]
    if len(verts) < 2:  # all collinear: keep the two endpoints
        verts = [uniq[0], uniq[-1]]
    return np.array([complex(a, b) for a, b in verts])


def _segment_distance(z, a, b):
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0.0:
        return abs(z - a)
    t = ((z - a).real * ab.real + (z - a).imag * ab.imag) / denom
    t = min(max(t, 0.0), 1.0)
    return abs(z - (a + t * ab))


def hull_distance(z, hull):
    """Euclidean distance from z to the hull (0 inside)."""
    hull = np.asarray(hull, dtype=np.complex128).reshape(-1)
    n = hull.size
    if n == 0:
        raise ValueError("empty hull")
    if n == 1:
        return abs(z - hull[0])
    if n == 2:
        return _segment_distance(z, hull[0], hull[1])
    inside = True
    dmin = np.inf
    for i in range(n):
        a, b = hull[i], hull[(i + 1) % n]
        ab, az = b - a, z - a
        if ab.real * az.imag - ab.imag * az.real < 0:
            inside = False
        dmin = min(dmin, _segment_distance(z, a, b))
    return 0.0 if inside else dmin


def hull_contains(z, hull, tol=0.0):
    return hull_distance(z, hull) <= tol


def densify_hull_boundary(hull, total=2048):
    """Points along the hull boundary, vertices included.

    The edge interiors matter when maximizing |f| over a convex region:
    the maximum sits on the boundary curve, not only at its extreme points.
    """
    hull = np.asarray(hull, dtype=np.complex128).reshape(-1)
    if hull.size == 1:
        return hull.copy()
    closed = hull.size > 2
    n = hull.size
    last = n if closed else n - 1
    lengths = np.array([abs(hull[(i + 1) % n] - hull[i]) for i in range(last)])
    perim = lengths.sum()
    out = []
    for i in range(last):
        a, b = hull[i], hull[(i + 1) % n]
        k = max(int(np.ceil(total * lengths[i] / perim)), 1) if perim > 0 else 1
        ts = np.arange(k) / k
        out.append(a + ts * (b - a))
    out.append(hull[-1:])
    return np.concatenate(out)
