"""The flattening maps ``F_alpha(x, y) = (x |x|^(alpha/2), y)`` and their distortion.

``F_alpha`` carries the quasidistance to a Euclidean distance up to a scale
function ``f_z`` that depends on the base point: near the axis (or far from
the base point relative to its distance to the axis) the image distance
behaves like ``r^(1 + alpha/2)``; close to a base point off the axis it is
linear, ``|x|^(alpha/2) r``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .ccsolver import DEFAULT_REGION, DEGENERATE, Rect
from .core import GrushinPoint, ParamsLike, PointLike, as_alpha, as_point, quasidistance_xy


class Norm(str, enum.Enum):
    LINF = "linf"
    EUCLIDEAN = "euclid"


class CaseLabel(str, enum.Enum):
    CASE_1 = "case_1"
    CASE_2 = "case_2"
    CASE_3_1 = "case_3_1"
    CASE_3_2 = "case_3_2"
    CASE_3_3 = "case_3_3"


_LABELS = list(CaseLabel)


class ScaleForm(str, enum.Enum):
    QUADRATIC = "quadratic"
    LINEAR_IN_X = "linear_in_x"


@dataclass(frozen=True)
class ScaleFunction:
    """``f_z(r) = r^exponent`` (QUADRATIC) or ``coefficient * r`` (LINEAR_IN_X).

    For the classical plane the exponent is 2 and the coefficient is ``|x|``;
    in general they are ``1 + alpha/2`` and ``|x|^(alpha/2)``.
    """

    form: ScaleForm
    coefficient: float = 0.0
    exponent: float = 2.0

    def __call__(self, r):
        if self.form is ScaleForm.QUADRATIC:
            return np.asarray(r, dtype=float) ** self.exponent if np.ndim(r) else float(r) ** self.exponent
        return self.coefficient * r


def forward_xy(x, y, alpha: float):
    x = np.asarray(x, dtype=float)
    return x * np.abs(x) ** (0.5 * alpha), np.asarray(y, dtype=float)


def inverse_xy(u, v, alpha: float):
    u = np.asarray(u, dtype=float)
    return np.sign(u) * np.abs(u) ** (2.0 / (2.0 + alpha)), np.asarray(v, dtype=float)


def forward_map(z: PointLike, p: ParamsLike = 2.0) -> tuple[float, float]:
    x, y = as_point(z)
    u, v = forward_xy(x, y, as_alpha(p))
    return float(u), float(v)


def inverse_map(w, p: ParamsLike = 2.0) -> GrushinPoint:
    u, v = w
    x, y = inverse_xy(u, v, as_alpha(p))
    return GrushinPoint(float(x), float(y))


def image_distance_xy(u1, v1, u2, v2, norm: Norm = Norm.EUCLIDEAN):
    du, dv = np.abs(np.asarray(u1) - u2), np.abs(np.asarray(v1) - v2)
    if Norm(norm) is Norm.LINF:
        return np.maximum(du, dv)
    return np.hypot(du, dv)


def classify_xy(x, y, xp, yp, alpha: float):
    """Case codes (indices into ``CaseLabel``), quasidistance and base abscissa.

    The pair is first normalized so the base point is ``(x, 0)`` with
    ``x >= 0``; both moves preserve the quasidistance exactly.
    """
    x, y, xp, yp = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, xp, yp)))
    flip = x < 0
    bx = np.where(flip, -x, x)
    px = np.where(flip, -xp, xp)
    py = yp - y
    r = quasidistance_xy(bx, 0.0, px, py, alpha)
    ax = np.abs(px)
    code = np.where(
        bx == 0,
        0,
        np.where(r <= 3 * bx, 1, np.where(ax <= bx, 2, np.where(ax >= r / 3, 4, 3))),
    )
    return code, r, bx


def _scale_values(code, r, bx, alpha: float):
    half = 0.5 * alpha
    return np.where(code == 1, bx**half * r, r ** (1.0 + half))


def classify_case(z: PointLike, zp: PointLike, p: ParamsLike = 2.0) -> tuple[CaseLabel, ScaleFunction]:
    (x, y), (xp, yp) = as_point(z), as_point(zp)
    alpha = as_alpha(p)
    code, _, bx = classify_xy(x, y, xp, yp, alpha)
    label = _LABELS[int(code)]
    if label is CaseLabel.CASE_2:
        return label, ScaleFunction(ScaleForm.LINEAR_IN_X, float(bx) ** (0.5 * alpha), 1.0)
    return label, ScaleFunction(ScaleForm.QUADRATIC, 0.0, 1.0 + 0.5 * alpha)


@dataclass(frozen=True)
class SandwichCheck:
    lower_ratio: float
    upper_ratio: float
    passed: bool
    norm_used: Norm


def sandwich_ratios(x1, y1, x2, y2, alpha: float, norm: Norm = Norm.LINF):
    """``|F(z) - F(z')| / f_z(d(z, z'))`` with each endpoint taken as the base."""
    u1, v1 = forward_xy(x1, y1, alpha)
    u2, v2 = forward_xy(x2, y2, alpha)
    image = image_distance_xy(u1, v1, u2, v2, norm)
    out = []
    for base, other in (((x1, y1), (x2, y2)), ((x2, y2), (x1, y1))):
        code, r, bx = classify_xy(*base, *other, alpha)
        out.append(image / _scale_values(code, r, bx, alpha))
    return out[0], out[1]


def sandwich_check(
    z: PointLike,
    zp: PointLike,
    p: ParamsLike = 2.0,
    c_s: float = 20.0,
    norm: Norm = Norm.LINF,
    lower: float | None = None,
) -> SandwichCheck:
    """Check ``lower * f(d) <= |F(z) - F(z')| <= c_s * f(d)`` from both endpoints.

    ``lower`` defaults to ``1/c_s``. The reported ratios are the smaller and
    larger of the two base-point orientations.
    """
    z, zp = as_point(z), as_point(zp)
    if z == zp:
        raise ValueError("sandwich check needs two distinct points")
    norm = Norm(norm)
    lower = 1.0 / c_s if lower is None else lower
    a, b = sandwich_ratios(z.x, z.y, zp.x, zp.y, as_alpha(p), norm)
    lo, hi = float(min(a, b)), float(max(a, b))
    return SandwichCheck(lo, hi, lo >= lower and hi <= c_s, norm)


@dataclass(frozen=True)
class EtaEnvelope:
    """Binned upper envelope of image ratios against domain ratios.

    ``rho_max`` is the raw per-bin maximum (NaN for empty bins); ``envelope``
    is its running maximum over bins, a lower bound for any admissible
    distortion function at ``t_hi``.
    """

    t_lo: np.ndarray
    t_hi: np.ndarray
    t_rep: np.ndarray
    rho_max: np.ndarray
    count: np.ndarray
    envelope: np.ndarray
    weak_constant: float
    n_triples: int
    seed: int

    def at(self, t: float) -> float:
        """Envelope value of the bin containing ``t``."""
        k = int(np.clip(np.searchsorted(self.t_hi, t), 0, len(self.t_hi) - 1))
        return float(self.envelope[k])


def sample_triples(region: Rect, n: int, rng: np.random.Generator, alpha: float) -> np.ndarray:
    """Uniform triples as rows ``(x1, y1, x2, y2, x3, y3)`` with distinct points."""
    lo = np.array([region.xmin, region.ymin] * 3)
    span = np.array([region.width, region.height] * 3)

    def bad(t):
        d12 = quasidistance_xy(t[:, 0], t[:, 1], t[:, 2], t[:, 3], alpha)
        d13 = quasidistance_xy(t[:, 0], t[:, 1], t[:, 4], t[:, 5], alpha)
        d23 = quasidistance_xy(t[:, 2], t[:, 3], t[:, 4], t[:, 5], alpha)
        return (d12 < DEGENERATE) | (d13 < DEGENERATE) | (d23 < DEGENERATE)

    pts = lo + span * rng.random((n, 6))
    mask = bad(pts)
    while mask.any():
        pts[mask] = lo + span * rng.random((int(mask.sum()), 6))
        mask = bad(pts)
    return pts


def triple_ratios(pts: np.ndarray, alpha: float, norm: Norm = Norm.EUCLIDEAN, identity: bool = False):
    """Domain ratio ``d(z3,z1)/d(z2,z1)`` and image ratio for each triple.

    With ``identity`` the map is replaced by the identity of the quasidistance
    space, so both ratios coincide.
    """
    x1, y1, x2, y2, x3, y3 = pts.T
    t = quasidistance_xy(x3, y3, x1, y1, alpha) / quasidistance_xy(x2, y2, x1, y1, alpha)
    if identity:
        return t, t.copy()
    u1, v1 = forward_xy(x1, y1, alpha)
    u2, v2 = forward_xy(x2, y2, alpha)
    u3, v3 = forward_xy(x3, y3, alpha)
    rho = image_distance_xy(u3, v3, u1, v1, norm) / image_distance_xy(u2, v2, u1, v1, norm)
    return t, rho


def eta_estimate(
    region: Rect = DEFAULT_REGION,
    p: ParamsLike = 2.0,
    n_triples: int = 1_000_000,
    seed: int = 42,
    n_bins: int = 32,
    norm: Norm = Norm.EUCLIDEAN,
    identity: bool = False,
) -> EtaEnvelope:
    """Empirical lower bound for the quasisymmetry modulus of ``F_alpha``.

    Triples are binned by ``log t`` over the observed range into ``n_bins``
    equal-width bins.
    """
    if n_triples < 1:
        raise ValueError("n_triples must be at least 1")
    if n_bins < 2:
        raise ValueError("n_bins must be at least 2")
    alpha = as_alpha(p)
    pts = sample_triples(region, n_triples, np.random.default_rng(seed), alpha)
    t, rho = triple_ratios(pts, alpha, Norm(norm), identity)

    logt = np.log(t)
    lo, hi = float(logt.min()), float(logt.max())
    if hi == lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, n_bins + 1)
    k = np.clip(np.searchsorted(edges, logt, side="right") - 1, 0, n_bins - 1)

    count = np.bincount(k, minlength=n_bins)
    rho_max = np.full(n_bins, -np.inf)
    np.maximum.at(rho_max, k, rho)
    t_rep = np.full(n_bins, -np.inf)
    np.maximum.at(t_rep, k, t)
    envelope = np.maximum.accumulate(np.where(count > 0, rho_max, 0.0))
    rho_max[count == 0] = np.nan
    t_rep[count == 0] = np.nan

    weak = rho[t <= 1.0]
    return EtaEnvelope(
        t_lo=np.exp(edges[:-1]),
        t_hi=np.exp(edges[1:]),
        t_rep=t_rep,
        rho_max=rho_max,
        count=count,
        envelope=envelope,
        weak_constant=float(weak.max()) if weak.size else math.nan,
        n_triples=n_triples,
        seed=seed,
    )
