"""Carnot-Caratheodory distance estimates.

Two independent routes: the closed-form staircase family (horizontal out to a
pivot column, vertical, horizontal back) and Dijkstra on an axis-parallel
lattice whose vertical edges carry the Grushin weight of their column.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .core import PointLike, ParamsLike, PolyPath, as_alpha, as_point, quasidistance_xy

DEFAULT_RESOLUTION = 512
DEGENERATE = 1e-12


class Branch(str, enum.Enum):
    INTERIOR_OPTIMUM = "interior_optimum"
    ENDPOINT_X1 = "endpoint_x1"
    ENDPOINT_X2 = "endpoint_x2"
    PURE_VERTICAL = "pure_vertical"


@dataclass(frozen=True)
class Rect:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        vals = (self.xmin, self.ymin, self.xmax, self.ymax)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("region bounds must be finite")
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError(f"empty region {vals}")

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    def contains(self, z: PointLike) -> bool:
        x, y = z
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.xmin, self.ymin, self.xmax, self.ymax)


DEFAULT_REGION = Rect(-2.0, -2.0, 2.0, 2.0)


def staircase_constant(alpha: float) -> float:
    """``K = (alpha/4)^(2/(2+alpha))``: the optimal pivot is ``K * dy^(2/(2+alpha))``."""
    return (alpha / 4.0) ** (2.0 / (2.0 + alpha))


@dataclass(frozen=True)
class StaircaseSolution:
    pivot_abscissa: float
    length: float
    branch: Branch
    start: tuple[float, float]
    end: tuple[float, float]

    def path(self) -> PolyPath:
        (x1, y1), (x2, y2), s = self.start, self.end, self.pivot_abscissa
        return PolyPath.through((x1, y1), (s, y1), (s, y2), (x2, y2))


def _staircase_cost(x1: float, x2: float, dy: float, s: float, alpha: float) -> float:
    return abs(x1 - s) + abs(x2 - s) + dy * abs(s) ** (-0.5 * alpha)


def staircase_distance(z1: PointLike, z2: PointLike, p: ParamsLike = 2.0) -> StaircaseSolution:
    """Best staircase joining ``z1`` and ``z2``; an upper bound for ``d_CC``.

    Minimizes ``|x1 - s| + |x2 - s| + |dy| |s|^(-alpha/2)`` over ``s != 0``.
    On each side of the axis the cost decreases until the far endpoint
    abscissa and is convex beyond it, so the side minimum is the stationary
    point ``+-(alpha |dy| / 4)^(2/(2+alpha))`` if it lies past that endpoint and
    the endpoint itself otherwise.
    """
    (x1, y1), (x2, y2) = as_point(z1), as_point(z2)
    alpha = as_alpha(p)
    dy = abs(y2 - y1)
    start, end = (x1, y1), (x2, y2)
    if dy == 0:
        return StaircaseSolution(x1, abs(x1 - x2), Branch.ENDPOINT_X1, start, end)

    s_star = (0.25 * alpha * dy) ** (2.0 / (2.0 + alpha))
    hi, lo = max(x1, x2), min(x1, x2)
    candidates = [s_star if s_star > hi else hi, -s_star if -s_star < lo else lo]
    costs = [_staircase_cost(x1, x2, dy, s, alpha) for s in candidates]
    # ties keep the positive side so the choice is deterministic
    s = candidates[0] if costs[0] <= costs[1] else candidates[1]
    length = min(costs)

    if abs(s) == s_star and s not in (x1, x2):
        branch = Branch.INTERIOR_OPTIMUM
    elif x1 == x2:
        branch = Branch.PURE_VERTICAL
    elif s == x1:
        branch = Branch.ENDPOINT_X1
    else:
        branch = Branch.ENDPOINT_X2
    return StaircaseSolution(s, length, branch, start, end)


class GrushinLattice:
    """Four-neighbour lattice over a rectangle, offset by ``h/2`` from its edges.

    Node ``(i, j)`` sits at ``(xmin + (i + 1/2) h, ymin + (j + 1/2) h)``;
    horizontal edges weigh ``h`` and vertical edges in column ``i`` weigh
    ``h |x_i|^(-alpha/2)``. No node lies on the axis when the region is
    symmetric about it.
    """

    def __init__(self, region: Rect, resolution: int, alpha: float):
        if resolution < 8:
            raise ValueError(f"resolution must be at least 8, got {resolution}")
        self.region = region
        self.alpha = alpha
        self.h = region.width / resolution
        self.nx = resolution
        self.ny = max(2, int(round(region.height / self.h)))
        self.xs = region.xmin + self.h * (0.5 + np.arange(self.nx))
        self.ys = region.ymin + self.h * (0.5 + np.arange(self.ny))
        self.graph = self._build()
        # mirror-symmetric weights let column i reuse the run from nx - 1 - i
        self.symmetric = bool(np.array_equal(np.abs(self.xs), np.abs(self.xs[::-1])))

    def _build(self):
        nx, ny, h = self.nx, self.ny, self.h
        idx = np.arange(nx * ny).reshape(nx, ny)
        with np.errstate(divide="ignore"):
            vert = h * np.abs(self.xs) ** (-0.5 * self.alpha)
        rows = np.concatenate([idx[:-1, :].ravel(), idx[:, :-1].ravel()])
        cols = np.concatenate([idx[1:, :].ravel(), idx[:, 1:].ravel()])
        weights = np.concatenate([np.full((nx - 1) * ny, h), np.repeat(vert, ny - 1)])
        keep = np.isfinite(weights)
        n = nx * ny
        return coo_matrix((weights[keep], (rows[keep], cols[keep])), shape=(n, n)).tocsr()

    def node_of(self, x, y):
        """Column and row indices of the nodes nearest to ``(x, y)``."""
        i = np.clip(np.floor((np.asarray(x) - self.region.xmin) / self.h), 0, self.nx - 1).astype(int)
        j = np.clip(np.floor((np.asarray(y) - self.region.ymin) / self.h), 0, self.ny - 1).astype(int)
        return i, j

    def flat(self, i, j):
        return np.asarray(i) * self.ny + np.asarray(j)

    def distances_from(self, i: int, j: int) -> np.ndarray:
        """Shortest-path lengths from node ``(i, j)`` to every node, shape ``(nx, ny)``."""
        d = dijkstra(self.graph, directed=False, indices=int(self.flat(i, j)))
        return d.reshape(self.nx, self.ny)


@lru_cache(maxsize=8)
def lattice(region: Rect, resolution: int, alpha: float) -> GrushinLattice:
    return GrushinLattice(region, resolution, alpha)


def grid_cc_distance(
    z1: PointLike,
    z2: PointLike,
    p: ParamsLike = 2.0,
    resolution: int = DEFAULT_RESOLUTION,
    region: Rect = DEFAULT_REGION,
) -> float:
    """Dijkstra distance between the lattice nodes nearest ``z1`` and ``z2``."""
    z1, z2 = as_point(z1), as_point(z2)
    for z in (z1, z2):
        if not region.contains(z):
            raise ValueError(f"point ({z.x}, {z.y}) lies outside region {region.as_tuple()}")
    lat = lattice(region, int(resolution), as_alpha(p))
    i1, j1 = lat.node_of(z1.x, z1.y)
    i2, j2 = lat.node_of(z2.x, z2.y)
    if (i1, j1) == (i2, j2):
        return 0.0
    return float(lat.distances_from(i1, j1)[i2, j2])


def grid_cc_distances(lat: GrushinLattice, x1, y1, x2, y2) -> np.ndarray:
    """Lattice distances for many pairs at once.

    Lattice weights do not depend on the row and a shortest path never leaves
    the band of rows between its endpoints, so the distance only depends on
    the two columns and the row gap. One Dijkstra run from the bottom row of
    each distinct source column serves every pair starting in that column,
    or in its mirror column when the weights are symmetric about the axis.
    """
    i1, j1 = lat.node_of(x1, y1)
    i2, j2 = lat.node_of(x2, y2)
    gap = np.abs(j1 - j2)
    if lat.symmetric:
        mirror = i1 >= lat.nx - 1 - i1
        i1 = np.where(mirror, lat.nx - 1 - i1, i1)
        i2 = np.where(mirror, lat.nx - 1 - i2, i2)
    out = np.empty(len(i1))
    for col in np.unique(i1):
        sel = np.flatnonzero(i1 == col)
        d = lat.distances_from(col, 0)
        out[sel] = d[i2[sel], gap[sel]]
    return out


@dataclass(frozen=True)
class ComparabilityReport:
    ratio_min: float
    ratio_max: float
    sample_count: int
    region: Rect
    seed: int
    alpha: float
    resolution: int
    table: dict = field(default=None, compare=False, repr=False)

    @property
    def constant(self) -> float:
        """Empirical comparability constant ``max{ratio_max, 1/ratio_min}``."""
        return max(self.ratio_max, 1.0 / self.ratio_min)


def sample_pairs(region: Rect, n: int, rng: np.random.Generator, reject=None) -> np.ndarray:
    """``n`` uniform point pairs as rows ``(x1, y1, x2, y2)``, redrawing rejected rows."""
    lo = np.array([region.xmin, region.ymin] * 2)
    span = np.array([region.width, region.height] * 2)
    pts = lo + span * rng.random((n, 4))
    bad = reject(pts) if reject is not None else np.zeros(n, bool)
    while bad.any():
        pts[bad] = lo + span * rng.random((int(bad.sum()), 4))
        bad = reject(pts)
    return pts


def comparability_scan(
    region: Rect = DEFAULT_REGION,
    p: ParamsLike = 2.0,
    n_samples: int = 10_000,
    seed: int = 42,
    resolution: int = DEFAULT_RESOLUTION,
) -> ComparabilityReport:
    """Sample pairs and record ``quasidistance / min(staircase, lattice)``.

    Pairs closer than ``1e-12`` in quasidistance, or whose endpoints snap to
    the same lattice node, are redrawn.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    alpha = as_alpha(p)
    lat = lattice(region, int(resolution), alpha)

    def reject(pts):
        q = quasidistance_xy(pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3], alpha)
        i1, j1 = lat.node_of(pts[:, 0], pts[:, 1])
        i2, j2 = lat.node_of(pts[:, 2], pts[:, 3])
        return (q < DEGENERATE) | ((i1 == i2) & (j1 == j2))

    pts = sample_pairs(region, n_samples, np.random.default_rng(seed), reject)
    x1, y1, x2, y2 = pts.T
    q = quasidistance_xy(x1, y1, x2, y2, alpha)
    stair = np.array([staircase_distance((a, b), (c, d), alpha).length for a, b, c, d in pts])
    grid = grid_cc_distances(lat, x1, y1, x2, y2)
    ratio = q / np.minimum(stair, grid)
    table = {
        "sample_id": np.arange(n_samples),
        "x1": x1, "y1": y1, "x2": x2, "y2": y2,
        "quasidistance": q, "staircase": stair, "grid": grid, "ratio": ratio,
    }
    return ComparabilityReport(
        ratio_min=float(ratio.min()),
        ratio_max=float(ratio.max()),
        sample_count=n_samples,
        region=region,
        seed=seed,
        alpha=alpha,
        resolution=int(resolution),
        table=table,
    )
