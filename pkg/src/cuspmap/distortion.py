"""Differential matrices, operator norm, and the pointwise distortion field.

The squeeze stage maps polar to polar, so its differential is expressed in
the orthonormal frames aligned with the polar directions at the source and
image points. In those frames the matrix is lower triangular: radial stretch
on the diagonal's first entry, tangential stretch on the second, and a shear
term from the radius-dependent angle map. The upper-right entry vanishes
identically.

Distortion is operator-norm squared over Jacobian determinant, with the value
1 at degenerate points. The Mobius stages are conformal and contribute
nothing, so the full chain's distortion at x equals the squeeze's distortion
at the corresponding polar point.

All field evaluation runs on r-scaled entries computed from log r, which
keeps the asymptotic regime (log-radii to -1e40 and beyond) in range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SeamError
from .maps import (
    MapChain,
    MapStage,
    PlanePoint,
    PolarPoint,
    Sector,
    cusp_map,
    mobius_to_halfplane,
)
from .profile import ProfileParams, _curves, _scaled_rates, evaluate

__all__ = [
    "Jacobian2",
    "DistortionSample",
    "EnvelopeFit",
    "cusp_jacobian",
    "cusp_jacobian_fd",
    "op_norm",
    "distortion",
    "distortion_values",
    "distortion_field",
    "chain_distortion",
    "fit_growth_envelope",
]

_HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class Jacobian2:
    """2x2 differential in polar-aligned frames at a basepoint."""

    a11: float
    a12: float
    a21: float
    a22: float
    base: PolarPoint


@dataclass(frozen=True)
class DistortionSample:
    base: PolarPoint
    op_norm: float
    jac_det: float
    K: float


def _angular_factors(theta, half_angle):
    """(shear factor, tangential factor) for arrays of normalized angles."""
    inner = (theta > -_HALF_PI) & (theta < _HALF_PI)
    outer_theta = np.where(theta >= _HALF_PI, theta, theta + 2.0 * math.pi)
    shear = np.where(inner, 2.0 * theta / math.pi, 2.0 - 2.0 * outer_theta / math.pi)
    tang = np.where(
        inner,
        (2.0 / math.pi) * half_angle,
        2.0 - (2.0 / math.pi) * half_angle,
    )
    return shear, tang


def _scaled_entries(logr, theta, log_cg):
    """r-scaled matrix entries (r*a11, r*a21, r*a22) from log r and angle."""
    l1, l2, g, G, aspect, slant = _curves(logr, log_cg)
    r_dg, r_da, r_dG = _scaled_rates(l1, l2, g, aspect, slant)
    half_angle = np.arctan(aspect)
    shear, tang = _angular_factors(theta, half_angle)
    m11 = r_dG
    m21 = shear * g * r_da / slant
    m22 = tang * g * slant
    return m11, m21, m22


def _k_from_entries(m11, m21, m22):
    """Distortion of the lower-triangular matrix [[m11, 0], [m21, m22]]."""
    t = m11 * m11 + m21 * m21 + m22 * m22
    det = m11 * m22
    disc = np.sqrt(np.maximum(t * t - 4.0 * det * det, 0.0))
    k = (t + disc) / (2.0 * det)
    return np.maximum(k, 1.0)


def distortion_values(logr, theta, params: ProfileParams):
    """Vectorized K over arrays of log-radii and normalized angles.

    Valid for log r <= 0 (the squeeze's closed-form region); log-radii may lie
    far below the double-precision radius floor.
    """
    logr = np.asarray(logr, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(logr > 0.0):
        raise DomainError("closed-form distortion needs r <= 1")
    return _k_from_entries(*_scaled_entries(logr, theta, params.log_cg()))


def cusp_jacobian(p: PolarPoint, params: ProfileParams) -> Jacobian2:
    """The displayed differential matrix of the squeeze at 0 < r <= 1."""
    if not (0.0 < p.r <= 1.0):
        raise DomainError(f"analytic squeeze matrix needs 0 < r <= 1, got {p.r}")
    m11, m21, m22 = _scaled_entries(
        np.float64(math.log(p.r)), np.float64(p.theta), params.log_cg()
    )
    return Jacobian2(float(m11) / p.r, 0.0, float(m21) / p.r, float(m22) / p.r, p)


def _extension_jacobian(p: PolarPoint, params: ProfileParams) -> Jacobian2:
    """Differential of the radial bi-Lipschitz extension for r > 1."""
    one = evaluate(1.0, params)
    tang = (
        (2.0 / math.pi) * one.half_angle
        if p.sector is Sector.INNER
        else 2.0 - (2.0 / math.pi) * one.half_angle
    )
    return Jacobian2(one.image_radius, 0.0, 0.0, one.image_radius * tang, p)


def cusp_jacobian_fd(p: PolarPoint, params: ProfileParams, h: float = 1e-7) -> Jacobian2:
    """Central finite differences of the raw squeeze, in the same frames.

    Radial step h*r, angular step h. Entirely independent of the closed-form
    derivatives: only map evaluations and frame rotations. Stencils that would
    straddle a seam or the radii {0, 1} are refused.
    """
    if not (0.0 < p.r <= 1.0):
        raise DomainError(f"finite differences need 0 < r <= 1, got {p.r}")
    hr = h * p.r
    for seam in (-_HALF_PI, _HALF_PI, 3.0 * _HALF_PI):
        if abs(p.theta - seam) < 2.0 * h:
            raise SeamError(f"theta {p.theta} within 2h of seam {seam}")
    if p.r + 2.0 * hr > 1.0 or p.r - 2.0 * hr <= 0.0:
        raise SeamError(f"radius {p.r} within 2h of the extension boundary")

    def image(r, theta):
        q = cusp_map(PolarPoint.from_angle(r, theta), params)
        return q.x1, q.x2

    u1, v1 = image(p.r + hr, p.theta)
    u0, v0 = image(p.r - hr, p.theta)
    col_r = ((u1 - u0) / (2.0 * hr), (v1 - v0) / (2.0 * hr))
    u1, v1 = image(p.r, p.theta + h)
    u0, v0 = image(p.r, p.theta - h)
    col_t = ((u1 - u0) / (2.0 * h * p.r), (v1 - v0) / (2.0 * h * p.r))

    u, v = image(p.r, p.theta)
    rho = math.hypot(u, v)
    c, s = u / rho, v / rho
    return Jacobian2(
        a11=c * col_r[0] + s * col_r[1],
        a12=c * col_t[0] + s * col_t[1],
        a21=-s * col_r[0] + c * col_r[1],
        a22=-s * col_t[0] + c * col_t[1],
        base=p,
    )


def op_norm(m: Jacobian2) -> float:
    """Largest singular value, closed form for 2x2."""
    t = m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22
    det = m.a11 * m.a22 - m.a12 * m.a21
    disc = math.sqrt(max(t * t - 4.0 * det * det, 0.0))
    return math.sqrt(0.5 * (t + disc))


def distortion(m: Jacobian2) -> DistortionSample:
    """op_norm^2 / det where the matrix is regular; 1 otherwise."""
    det = m.a11 * m.a22 - m.a12 * m.a21
    norm = op_norm(m)
    entries_ok = all(math.isfinite(v) for v in (m.a11, m.a12, m.a21, m.a22))
    if not entries_ok or det <= 0.0:
        return DistortionSample(m.base, norm, det, 1.0)
    return DistortionSample(m.base, norm, det, max(norm * norm / det, 1.0))


def distortion_field(r_values, theta_values, params: ProfileParams):
    """Per-point K over the polar product grid, r-major deterministic order."""
    samples = []
    for r in r_values:
        for theta in theta_values:
            p = PolarPoint.from_angle(r, theta)
            samples.append(distortion(cusp_jacobian(p, params)))
    return samples


def chain_distortion(x: PlanePoint, chain: MapChain) -> DistortionSample:
    """Distortion of the chain at x; Mobius stages contribute factor 1."""
    here = PolarPoint.from_plane(x) if not x.at_infinity else PolarPoint.from_angle(0.0, 0.0)
    if not chain.has_cusp():
        return DistortionSample(here, 1.0, 1.0, 1.0)
    w = x
    for stage in chain.stages:
        if stage is MapStage.CUSP:
            break
        if stage is MapStage.DISK_TO_HALFPLANE:
            w = mobius_to_halfplane(w)
    if w.at_infinity or w.norm() == 0.0:
        return DistortionSample(here, 1.0, 1.0, 1.0)
    p = PolarPoint.from_plane(w)
    if p.r > 1.0:
        return distortion(_extension_jacobian(p, chain.params))
    return distortion(cusp_jacobian(p, chain.params))


def chain_distortion_values(points, chain: MapChain):
    """Vectorized chain K at an array of complex source points.

    Points at the squeeze's singular preimage or the first Mobius pole get
    the conventional value 1.
    """
    z = np.asarray(points, dtype=complex)
    if not chain.has_cusp():
        return np.ones(z.shape, dtype=float)
    w = z
    if MapStage.DISK_TO_HALFPLANE in chain.stages:
        with np.errstate(divide="ignore", invalid="ignore"):
            w = (z + 1.0) / (1.0 - z)
    r = np.abs(w)
    theta = np.arctan2(w.imag, w.real)
    theta = np.where(theta < -_HALF_PI, theta + 2.0 * math.pi, theta)
    out = np.ones(r.shape, dtype=float)
    good = np.isfinite(r) & (r > 0.0)

    interior = good & (r <= 1.0)
    if np.any(interior):
        out[interior] = distortion_values(
            np.log(r[interior]), theta[interior], chain.params
        )
    beyond = good & (r > 1.0)
    if np.any(beyond):
        one = evaluate(1.0, chain.params)
        inner = np.abs(theta[beyond]) < _HALF_PI
        tang = np.where(
            inner,
            (2.0 / math.pi) * one.half_angle,
            2.0 - (2.0 / math.pi) * one.half_angle,
        )
        out[beyond] = np.maximum(tang, 1.0 / tang)
    return out


@dataclass(frozen=True)
class EnvelopeFit:
    """Ratios of K against the log * loglog growth envelope along one ray."""

    theta: float
    r_values: tuple
    ratios: tuple
    ratio_min: float
    ratio_max: float
    band: tuple
    passed: bool


def fit_growth_envelope(
    r_values,
    theta: float,
    params: ProfileParams,
    band=(0.05, 2.0),
) -> EnvelopeFit:
    """Compare K(r, theta) with log(cg/r) * loglog(cg/r) along a ray.

    PASS means every ratio lies inside `band`. r_values may be given as
    radii; they are log-spaced tiny values so the computation happens on
    log r.
    """
    r = np.asarray(r_values, dtype=float)
    if np.any(r <= 0.0) or np.any(r > 1.0):
        raise DomainError("envelope fit needs radii in (0, 1]")
    logr = np.log(r)
    theta_n = PolarPoint.from_angle(1.0, theta).theta
    k = distortion_values(logr, np.full(logr.shape, theta_n), params)
    l1 = params.log_cg() - logr
    envelope = l1 * np.log(l1)
    ratios = k / envelope
    lo, hi = float(np.min(ratios)), float(np.max(ratios))
    return EnvelopeFit(
        theta=theta_n,
        r_values=tuple(float(v) for v in r),
        ratios=tuple(float(v) for v in ratios),
        ratio_min=lo,
        ratio_max=hi,
        band=(float(band[0]), float(band[1])),
        passed=bool(band[0] <= lo and hi <= band[1]),
    )
