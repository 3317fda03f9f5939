"""Weights ``|x|^beta`` as Jacobians: exponent algebra, densities, integrability.

Pulling the plane back through ``F_alpha^{-1}`` and measuring with the
Grushin volume element ``|x|^(-alpha/2) dx dy`` gives a density comparable
to ``|u|^(-2 alpha / (2 + alpha))``; solving for ``alpha`` realizes every
``beta`` in ``(-2, 0)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import PointLike, as_point
from .quadrature import integrate
from .qsmaps import inverse_xy


class NonIntegrableWeight(ValueError):
    """The weight ``|x|^beta`` is not locally integrable near the axis."""


class Regime(str, enum.Enum):
    TRIVIAL_IDENTITY = "trivial_identity"
    SEMMES_RANGE = "semmes_range"
    PAPER_RANGE = "paper_range"
    OPEN = "open"
    REJECTED = "rejected"


@dataclass(frozen=True)
class WeightExponent:
    beta: float
    derived_alpha: float | None
    regime: Regime


def alpha_for_beta(beta: float) -> WeightExponent:
    if not math.isfinite(beta):
        raise ValueError(f"beta must be finite, got {beta}")
    if beta > 0:
        return WeightExponent(beta, None, Regime.REJECTED)
    if beta == 0:
        return WeightExponent(beta, None, Regime.TRIVIAL_IDENTITY)
    if beta <= -2:
        return WeightExponent(beta, None, Regime.OPEN)
    regime = Regime.SEMMES_RANGE if beta > -1 else Regime.PAPER_RANGE
    return WeightExponent(beta, -2.0 * beta / (2.0 + beta), regime)


def beta_for_alpha(alpha: float) -> float:
    return -2.0 * alpha / (2.0 + alpha)


@dataclass(frozen=True)
class DensityProbe:
    point: tuple[float, float]
    euclidean_factor: float
    grushin_density: float
    total: float


def _check_beta(beta: float) -> float:
    w = alpha_for_beta(beta)
    if w.derived_alpha is None:
        raise ValueError(f"density defined only for -2 < beta < 0, got {beta} ({w.regime.value})")
    return w.derived_alpha


def jacobian_density(u: float, beta: float, v: float = 0.0) -> DensityProbe:
    """Volume distortion of ``F_alpha^{-1}`` at ``(u, v)`` in the Grushin volume.

    ``euclidean_factor`` is ``dx/du = (2/(2+alpha)) |u|^(-alpha/(2+alpha))`` and
    ``grushin_density`` is ``|x|^(-alpha/2)`` at ``x = |u|^(2/(2+alpha))``; their
    product is ``(2/(2+alpha)) |u|^beta``.
    """
    alpha = _check_beta(beta)
    if u == 0:
        raise ValueError("density is unbounded on the axis u = 0")
    au = abs(u)
    euclid = (2.0 / (2.0 + alpha)) * au ** (-alpha / (2.0 + alpha))
    x = au ** (2.0 / (2.0 + alpha))
    grushin = x ** (-0.5 * alpha)
    return DensityProbe((float(u), float(v)), euclid, grushin, euclid * grushin)


def area_distortion(u: float, beta: float, side: float = 1e-4, v: float = 0.0) -> float:
    """Finite-difference volume ratio of a small square pushed through ``F_alpha^{-1}``.

    The square of the given side centred at ``(u, v)`` maps to a rectangle whose
    Grushin volume is integrated numerically in ``x``; the result is divided
    by the square's area.
    """
    alpha = _check_beta(beta)
    (xa, xb), _ = inverse_xy(np.array([u - 0.5 * side, u + 0.5 * side]), np.array([v, v]), alpha)
    if np.sign(xa) * np.sign(xb) <= 0:
        raise ValueError("square touches the axis")
    lo, hi = sorted((abs(float(xa)), abs(float(xb))))
    width = integrate(lambda x: x ** (-0.5 * alpha), lo, hi, 1e-16 * (hi - lo))
    return width * side / side**2


def loglog_slope(u1: float, u2: float, beta: float) -> float:
    t1 = jacobian_density(u1, beta).total
    t2 = jacobian_density(u2, beta).total
    return math.log(t2 / t1) / math.log(u2 / u1)


@dataclass(frozen=True)
class AclReport:
    """Integrability of ``x^(-t/2)`` on ``(0, 1]``.

    ``partial`` holds ``(delta, integral over [delta, 1])`` rows; when the
    integral diverges they grow without bound as ``delta -> 0``.
    """

    t: float
    integrable: bool
    integral: float | None
    partial: list = field(default_factory=list)


def acl_integrability(t: float, deltas=tuple(10.0**-k for k in range(1, 13, 2))) -> AclReport:
    """``|x|^(-t/2)`` is locally integrable on horizontal lines iff ``t < 2``."""
    exponent = -0.5 * t
    # x = e^s turns the integrand into the smooth e^{s (1 - t/2)}
    partial = [
        (d, integrate(lambda s: np.exp(s * (1.0 + exponent)), math.log(d), 0.0, 1e-12))
        for d in deltas
    ]
    if t < 2:
        return AclReport(t, True, 1.0 / (1.0 + exponent), partial)
    return AclReport(t, False, None, partial)


@dataclass(frozen=True)
class SemmesEstimate:
    value: float
    stderr: float
    mass: float
    mass_stderr: float

    @property
    def rel_stderr(self) -> float:
        return self.stderr / self.value if self.value else 0.0


def _weight_cdf_inverse(w, a: float, b: float, beta: float):
    """Invert the CDF of ``|x|^beta`` restricted to ``[a, b]``."""
    g = lambda x: np.sign(x) * np.abs(x) ** (1.0 + beta)
    ga, gb = g(a), g(b)
    target = ga + w * (gb - ga)
    return np.sign(target) * np.abs(target) ** (1.0 / (1.0 + beta))


def ball_mass(center: PointLike, radius: float, beta: float, mc_samples: int, seed: int):
    """Stratified Monte Carlo estimate of ``int_{B(center, radius)} |x|^beta``.

    The abscissa is drawn from the normalized weight on the bounding box, so
    each sample contributes the box mass times an inside-the-disk indicator.
    The unit square of (weight-CDF, uniform) coordinates is cut into an
    ``m x m`` grid of strata with two samples each.
    """
    cx, cy = as_point(center)
    a, b = cx - radius, cx + radius
    box_mass = (_antideriv(b, beta) - _antideriv(a, beta)) * 2.0 * radius

    m = max(1, int(math.sqrt(mc_samples / 2)))
    per = 2
    rng = np.random.default_rng(seed)
    ii, jj = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    w = (ii[..., None] + rng.random((m, m, per))) / m
    s = (jj[..., None] + rng.random((m, m, per))) / m
    x = _weight_cdf_inverse(w, a, b, beta)
    y = cy - radius + 2.0 * radius * s
    inside = ((x - cx) ** 2 + (y - cy) ** 2 <= radius * radius).astype(float)

    stratum_mean = inside.mean(axis=-1)
    stratum_var = inside.var(axis=-1, ddof=1)
    n_strata = m * m
    mass = box_mass * float(stratum_mean.mean())
    mass_se = box_mass * math.sqrt(stratum_var.sum() / per) / n_strata
    return mass, mass_se


def _antideriv(x: float, beta: float) -> float:
    return math.copysign(abs(x) ** (1.0 + beta), x) / (1.0 + beta)


def semmes_quasidistance(
    z1: PointLike,
    z2: PointLike,
    beta: float,
    mc_samples: int = 200_000,
    seed: int = 42,
) -> SemmesEstimate:
    """``delta(z1, z2) = (mu(B(z1, |z1 - z2|)))^(1/2)`` for ``d mu = |x|^beta dx dy``."""
    if not beta > -1:
        raise NonIntegrableWeight(f"|x|^beta is not locally integrable for beta = {beta} <= -1")
    if mc_samples < 1:
        raise ValueError("mc_samples must be at least 1")
    z1, z2 = as_point(z1), as_point(z2)
    radius = math.hypot(z1.x - z2.x, z1.y - z2.y)
    if radius == 0:
        return SemmesEstimate(0.0, 0.0, 0.0, 0.0)
    mass, mass_se = ball_mass(z1, radius, beta, mc_samples, seed)
    value = math.sqrt(mass)
    return SemmesEstimate(value, mass_se / (2.0 * value) if value else 0.0, mass, mass_se)
