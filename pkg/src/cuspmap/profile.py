"""Radial profile driving the cusp squeeze.

Three curves of the source radius r control the map: the cusp depth
1/loglog(cg/r), the cusp aspect (depth-scaled exponential width), and the
image radius. Everything is evaluated through the log-space intermediates
l1 = log(cg/r), l2 = log(l1), which keeps radii down to 1e-300 representable:

    depth        = 1 / l2
    aspect       = l2 / l1          (identical to exp(-1/depth)/depth)
    image_radius = depth * sqrt(1 + aspect^2)

Derivatives are closed forms obtained by the chain rule; finite differences
fail at extreme radii, the closed forms do not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "ProfileParams",
    "ProfileEval",
    "depth",
    "depth_inverse",
    "depth_inverse_log",
    "evaluate",
]

# Dyadic grid depth used by the construction-time monotonicity check.
_CHECK_LEVELS = 48


@dataclass(frozen=True)
class ProfileParams:
    """Cusp constant cg and working radius range (0, r_max].

    The curves are positive and strictly increasing on (0, r_max] only when
    loglog(cg / r_max) > 0; both facts are checked at construction, the
    monotonicity numerically on a dyadic grid.
    """

    cg: float = 16.0
    r_max: float = 1.0

    def __post_init__(self):
        if not (self.cg > 0.0 and math.isfinite(self.cg)):
            raise DomainError(f"cusp constant must be positive and finite, got {self.cg}")
        if not (0.0 < self.r_max and math.isfinite(self.r_max)):
            raise DomainError(f"r_max must be positive and finite, got {self.r_max}")
        l1 = math.log(self.cg) - math.log(self.r_max)
        if l1 <= 0.0 or math.log(l1) <= 0.0:
            raise DomainError(
                f"profile positivity fails at r_max: loglog({self.cg}/{self.r_max}) <= 0"
            )
        rs = self.r_max * 2.0 ** -np.arange(_CHECK_LEVELS, dtype=float)
        d, g = _curves(np.log(rs), math.log(self.cg))[2:4]
        if not (np.all(np.diff(d) < 0.0) and np.all(np.diff(g) < 0.0)):
            raise DomainError("depth/image radius are not strictly increasing on (0, r_max]")

    def log_cg(self) -> float:
        return math.log(self.cg)


@dataclass(frozen=True)
class ProfileEval:
    """All profile quantities at one radius."""

    r: float
    depth: float
    depth_rate: float
    aspect: float
    aspect_rate: float
    image_radius: float
    image_radius_rate: float
    half_angle: float


def _curves(logr, log_cg):
    """Vector core: (l1, l2, depth, image_radius, aspect, slant) from log r.

    slant = sqrt(1 + aspect^2). Raises DomainError if any radius leaves the
    positivity region.
    """
    l1 = log_cg - logr
    l2 = np.log(np.where(l1 > 0.0, l1, np.nan))
    if not np.all(l1 > 0.0) or not np.all(l2 > 0.0):
        raise DomainError("loglog(cg/r) <= 0: radius outside the profile's positivity region")
    g = 1.0 / l2
    aspect = l2 / l1
    slant = np.sqrt(1.0 + aspect * aspect)
    return l1, l2, g, g * slant, aspect, slant


def _scaled_rates(l1, l2, g, aspect, slant):
    """r-scaled derivatives: (r*depth', r*aspect', r*image_radius')."""
    r_dg = 1.0 / (l1 * l2 * l2)
    r_da = (l2 - 1.0) / (l1 * l1)
    r_dG = (r_dg * (1.0 + aspect * aspect) + g * aspect * r_da) / slant
    return r_dg, r_da, r_dG


def _check_range(r: float, params: ProfileParams) -> None:
    if not (0.0 < r <= params.r_max):
        raise DomainError(f"radius {r!r} outside (0, {params.r_max}]")


def depth(r: float, params: ProfileParams) -> float:
    """Cusp depth 1/loglog(cg/r); strictly positive on (0, r_max]."""
    _check_range(r, params)
    l1 = params.log_cg() - math.log(r)
    l2 = math.log(l1)
    if l2 <= 0.0:
        raise DomainError(f"loglog({params.cg}/{r}) <= 0")
    return 1.0 / l2


def depth_inverse(value: float, params: ProfileParams) -> float:
    """Radius with the given depth: cg * exp(-exp(1/value)).

    Underflows gracefully to 0.0 once the true radius drops below the
    smallest subnormal; use depth_inverse_log when the log-radius is needed.
    """
    return math.exp(depth_inverse_log(value, params))


def depth_inverse_log(value: float, params: ProfileParams) -> float:
    """log of the radius with the given depth (finite far past underflow)."""
    if not (0.0 < value and math.isfinite(value)):
        raise DomainError(f"depth value {value!r} outside (0, depth(r_max)]")
    if value > depth(params.r_max, params) * (1.0 + 1e-12):
        raise DomainError(f"depth value {value!r} exceeds depth(r_max)")
    try:
        e = math.exp(1.0 / value)
    except OverflowError:
        return -math.inf
    return params.log_cg() - e


def evaluate(r: float, params: ProfileParams) -> ProfileEval:
    """All profile quantities and first derivatives at r."""
    _check_range(r, params)
    l1, l2, g, G, aspect, slant = _curves(np.float64(math.log(r)), params.log_cg())
    r_dg, r_da, r_dG = _scaled_rates(l1, l2, g, aspect, slant)
    return ProfileEval(
        r=r,
        depth=float(g),
        depth_rate=float(r_dg) / r,
        aspect=float(aspect),
        aspect_rate=float(r_da) / r,
        image_radius=float(G),
        image_radius_rate=float(r_dG) / r,
        half_angle=math.atan(float(aspect)),
    )
