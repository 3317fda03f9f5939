"""Points, the quasidistance, and Grushin lengths of polygonal paths.

The generalized Grushin plane ``G_alpha`` is the plane with line element
``ds^2 = dx^2 + |x|^(-alpha) dy^2``; vertical motion is forbidden on the
y-axis and cheap far from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from .quadrature import integrate

SEGMENT_TOL = 1e-10


@dataclass(frozen=True)
class GrushinPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y


@dataclass(frozen=True)
class MetricParams:
    alpha: float = 2.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be a positive finite number, got {self.alpha}")
        object.__setattr__(self, "alpha", float(self.alpha))


PointLike = Union[GrushinPoint, Sequence[float]]
ParamsLike = Union[MetricParams, float]


def as_point(z: PointLike) -> GrushinPoint:
    if isinstance(z, GrushinPoint):
        return z
    x, y = z
    return GrushinPoint(x, y)


def as_alpha(p: ParamsLike) -> float:
    if isinstance(p, MetricParams):
        return p.alpha
    return MetricParams(p).alpha


@dataclass(frozen=True)
class PolyPath:
    """Concatenation of straight segments between consecutive vertices."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple(as_point(v) for v in self.vertices)
        if len(verts) < 2:
            raise ValueError("a path needs at least two vertices")
        for a, b in zip(verts, verts[1:]):
            if a == b:
                raise ValueError(f"consecutive vertices coincide at ({a.x}, {a.y})")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def through(cls, *points: PointLike) -> "PolyPath":
        """Build a path, silently dropping repeated consecutive vertices."""
        verts = []
        for z in map(as_point, points):
            if not verts or verts[-1] != z:
                verts.append(z)
        return cls(tuple(verts))

    def segments(self):
        return zip(self.vertices, self.vertices[1:])

    def reversed(self) -> "PolyPath":
        return PolyPath(self.vertices[::-1])

    def concat(self, other: "PolyPath") -> "PolyPath":
        if self.vertices[-1] != other.vertices[0]:
            raise ValueError("paths do not join")
        return PolyPath(self.vertices + other.vertices[1:])

    def refined(self) -> "PolyPath":
        """Insert the midpoint of every segment."""
        verts = [self.vertices[0]]
        for a, b in self.segments():
            verts.append(GrushinPoint(0.5 * (a.x + b.x), 0.5 * (a.y + b.y)))
            verts.append(b)
        return PolyPath(tuple(verts))


def quasidistance_xy(x1, y1, x2, y2, alpha: float):
    """Vectorized quasidistance on coordinate arrays.

    ``max{|dx|, min{|dy|^(2/(2+alpha)), |dy| / max{|x1|, |x2|}^(alpha/2)}}``
    with the second min-operand read as +inf when both abscissae vanish.
    """
    x1, y1, x2, y2 = (np.asarray(v, dtype=float) for v in (x1, y1, x2, y2))
    dx = np.abs(x1 - x2)
    dy = np.abs(y1 - y2)
    half = 0.5 * alpha
    scale = np.maximum(np.abs(x1) ** half, np.abs(x2) ** half)
    with np.errstate(over="ignore"):
        ratio = np.divide(dy, scale, out=np.full(np.broadcast(dy, scale).shape, np.inf), where=scale > 0)
    inner = np.minimum(dy ** (2.0 / (2.0 + alpha)), ratio)
    inner = np.where(dy == 0, 0.0, inner)
    return np.maximum(dx, inner)


def quasidistance(z1: PointLike, z2: PointLike, p: ParamsLike = 2.0) -> float:
    (x1, y1), (x2, y2) = as_point(z1), as_point(z2)
    return float(quasidistance_xy(x1, y1, x2, y2, as_alpha(p)))


def quasidistance_branch(z1: PointLike, z2: PointLike, p: ParamsLike = 2.0) -> tuple[float, str]:
    """Quasidistance together with the operand that realized it.

    The branch is ``identical``, ``horizontal`` (``|dx|`` wins the max),
    ``power`` (``|dy|^(2/(2+alpha))``) or ``ratio`` (``|dy|/max|x|^(alpha/2)``).
    """
    (x1, y1), (x2, y2) = as_point(z1), as_point(z2)
    alpha = as_alpha(p)
    value = float(quasidistance_xy(x1, y1, x2, y2, alpha))
    if value == 0.0:
        return value, "identical"
    dy = abs(y1 - y2)
    if abs(x1 - x2) >= value:
        return value, "horizontal"
    scale = max(abs(x1), abs(x2)) ** (0.5 * alpha)
    if scale == 0 or dy ** (2.0 / (2.0 + alpha)) <= dy / scale:
        return value, "power"
    return value, "ratio"


def linf_distance(a: Sequence[float], b: Sequence[float]) -> float:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def euclidean_distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _slanted_length(xa: float, xb: float, slope: float, alpha: float) -> float:
    """Length of a slanted segment with ``x`` in ``[xa, xb]`` not crossing 0."""
    lo, hi = sorted((abs(xa), abs(xb)))
    m2 = slope * slope
    return integrate(lambda x: np.sqrt(1.0 + m2 * x ** (-alpha)), lo, hi, SEGMENT_TOL)


def _from_axis_length(reach: float, slope: float, alpha: float) -> float:
    """Length of a slanted segment from the axis out to ``|x| = reach``, alpha < 2.

    Substituting ``x = reach * w**q`` with ``q = 2/(2 - alpha)`` removes the
    ``x^(-alpha/2)`` endpoint singularity; the transformed integrand is
    ``reach * q * sqrt(w^(2q-2) + slope^2 * reach^(-alpha))``.
    """
    q = 2.0 / (2.0 - alpha)
    c = slope * slope * reach ** (-alpha)
    return reach * q * integrate(lambda w: np.sqrt(w ** (2.0 * q - 2.0) + c), 0.0, 1.0, SEGMENT_TOL)


def segment_length(a: PointLike, b: PointLike, p: ParamsLike = 2.0) -> float:
    """Grushin length of the straight segment ``a -> b``; ``inf`` when inadmissible."""
    (xa, ya), (xb, yb) = as_point(a), as_point(b)
    alpha = as_alpha(p)
    dx, dy = xb - xa, yb - ya
    if dy == 0:
        return abs(dx)
    if dx == 0:
        if xa == 0:
            return math.inf
        return abs(dy) * abs(xa) ** (-0.5 * alpha)
    slope = dy / dx
    if min(xa, xb) <= 0.0 <= max(xa, xb):
        if alpha >= 2:
            return math.inf
        return sum(_from_axis_length(abs(xe), slope, alpha) for xe in (xa, xb) if xe != 0)
    return _slanted_length(xa, xb, slope, alpha)


def path_length(path: PolyPath, p: ParamsLike = 2.0) -> float:
    """Sum of segment lengths; ``math.inf`` marks an inadmissible path."""
    alpha = as_alpha(p)
    return math.fsum(segment_length(a, b, alpha) for a, b in path.segments())
