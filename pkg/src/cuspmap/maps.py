"""The plane homeomorphism squeezing the unit disk onto a cusp domain.

Three stages compose left to right:

    f1: Mobius map of the unit disk onto the right half plane, (-1,0) -> 0
    f2: sector-wise polar squeeze creating the exponential cusp
    f3: Mobius map of the right half plane onto the disk B((1/2,0), 1/2)

The squeeze acts on polar coordinates (r, theta) with theta normalized to
[-pi/2, 3pi/2). The inner sector |theta| < pi/2 is compressed into the cusp
throat; the outer sector covers the rest of the image circle. Outside the
closed unit disk the squeeze continues as the radial bi-Lipschitz extension
of its unit-circle restriction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ConvergenceError, DomainError, RangeError
from .profile import ProfileParams, evaluate

__all__ = [
    "PlanePoint",
    "PolarPoint",
    "Sector",
    "MapStage",
    "MapChain",
    "TraceRow",
    "mobius_to_halfplane",
    "mobius_to_halfplane_inv",
    "mobius_to_disk",
    "mobius_to_disk_inv",
    "inner_angle_map",
    "outer_angle_map",
    "cusp_map",
    "cusp_map_inv",
    "apply_chain",
    "apply_chain_inv",
    "boundary_image_trace",
    "fit_tip_curvature",
]

_HALF_PI = math.pi / 2.0
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PlanePoint:
    """Point of the extended plane; one-point compactification via a flag."""

    x1: float
    x2: float
    at_infinity: bool = False

    def __post_init__(self):
        if not self.at_infinity and not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise DomainError(f"non-finite coordinates ({self.x1}, {self.x2}) without infinity flag")

    @classmethod
    def from_complex(cls, z: complex) -> "PlanePoint":
        return cls(z.real, z.imag)

    @classmethod
    def infinity(cls) -> "PlanePoint":
        return cls(math.inf, math.inf, at_infinity=True)

    def as_complex(self) -> complex:
        if self.at_infinity:
            raise DomainError("point at infinity has no complex value")
        return complex(self.x1, self.x2)

    def norm(self) -> float:
        return math.inf if self.at_infinity else math.hypot(self.x1, self.x2)


ORIGIN = PlanePoint(0.0, 0.0)


class Sector(Enum):
    INNER = "inner"
    OUTER = "outer"


def normalize_angle(theta: float) -> float:
    """Reduce an angle into [-pi/2, 3pi/2)."""
    t = math.fmod(theta + _HALF_PI, _TWO_PI)
    if t < 0.0:
        t += _TWO_PI
    t -= _HALF_PI
    # fmod can land exactly on the open end after rounding
    if t >= 3.0 * _HALF_PI:
        t = -_HALF_PI
    return t


def _sector_of(theta: float) -> Sector:
    # both seams, theta = +-pi/2, belong to the outer closed interval
    return Sector.INNER if -_HALF_PI < theta < _HALF_PI else Sector.OUTER


@dataclass(frozen=True)
class PolarPoint:
    """Polar point with the seam bookkeeping of the squeeze stage."""

    r: float
    theta: float
    sector: Sector

    def __post_init__(self):
        if self.r < 0.0 or not math.isfinite(self.r):
            raise DomainError(f"polar radius must be finite and >= 0, got {self.r}")
        if not (-_HALF_PI <= self.theta < 3.0 * _HALF_PI):
            raise DomainError(f"theta {self.theta} not normalized to [-pi/2, 3pi/2)")
        if self.sector is not _sector_of(self.theta):
            raise DomainError(f"sector {self.sector} inconsistent with theta {self.theta}")

    @classmethod
    def from_angle(cls, r: float, theta: float) -> "PolarPoint":
        t = normalize_angle(theta)
        return cls(r, t, _sector_of(t))

    @classmethod
    def from_plane(cls, p: PlanePoint) -> "PolarPoint":
        if p.at_infinity:
            raise DomainError("cannot take polar coordinates of infinity")
        return cls.from_angle(math.hypot(p.x1, p.x2), math.atan2(p.x2, p.x1))

    def outer_angle(self) -> float:
        """Angle shifted into the outer interval [pi/2, 3pi/2]."""
        return self.theta if self.theta >= _HALF_PI else self.theta + _TWO_PI


class MapStage(Enum):
    """Chain stages; `token` is the CLI spelling."""

    DISK_TO_HALFPLANE = "f1"
    CUSP = "f2"
    HALFPLANE_TO_DISK = "f3"

    @property
    def token(self) -> str:
        return self.value


_STAGE_ORDER = (MapStage.DISK_TO_HALFPLANE, MapStage.CUSP, MapStage.HALFPLANE_TO_DISK)


@dataclass(frozen=True)
class MapChain:
    """Ordered selection of stages plus the profile parameters."""

    params: ProfileParams
    stages: tuple = _STAGE_ORDER

    def __post_init__(self):
        stages = tuple(self.stages)
        object.__setattr__(self, "stages", stages)
        if not stages:
            raise DomainError("chain must contain at least one stage")
        order = [s for s in _STAGE_ORDER if s in stages]
        if list(stages) != order or len(set(stages)) != len(stages):
            raise DomainError("stages must be distinct and in f1 -> f2 -> f3 order")
        if MapStage.CUSP in stages and self.params.r_max < 1.0:
            raise DomainError("the squeeze stage needs r_max >= 1")

    @classmethod
    def default(cls, cg: float = 16.0) -> "MapChain":
        return cls(ProfileParams(cg=cg))

    @classmethod
    def from_tokens(cls, tokens, params: ProfileParams) -> "MapChain":
        by_token = {s.token: s for s in MapStage}
        try:
            stages = tuple(by_token[t.strip()] for t in tokens)
        except KeyError as exc:
            raise DomainError(f"unknown stage token {exc.args[0]!r}") from None
        return cls(params, stages)

    def has_cusp(self) -> bool:
        return MapStage.CUSP in self.stages


# ---------------------------------------------------------------------------
# Mobius stages
# ---------------------------------------------------------------------------

def _mobius(p: PlanePoint, num, den, at_inf: complex) -> PlanePoint:
    """Evaluate (az+b)/(cz+d) given closures for numerator/denominator."""
    if p.at_infinity:
        return PlanePoint.from_complex(at_inf)
    z = p.as_complex()
    d = den(z)
    if d == 0:
        return PlanePoint.infinity()
    return PlanePoint.from_complex(num(z) / d)


def mobius_to_halfplane(p: PlanePoint) -> PlanePoint:
    """(z+1)/(1-z): unit disk onto the right half plane, -1 -> 0, 1 -> inf."""
    return _mobius(p, lambda z: z + 1.0, lambda z: 1.0 - z, complex(-1.0, 0.0))


def mobius_to_halfplane_inv(p: PlanePoint) -> PlanePoint:
    """(w-1)/(w+1): inverse of mobius_to_halfplane."""
    return _mobius(p, lambda w: w - 1.0, lambda w: w + 1.0, complex(1.0, 0.0))


def mobius_to_disk(p: PlanePoint) -> PlanePoint:
    """z/(z+1): right half plane onto the disk B((1/2, 0), 1/2), inf -> 1."""
    return _mobius(p, lambda z: z, lambda z: z + 1.0, complex(1.0, 0.0))


def mobius_to_disk_inv(p: PlanePoint) -> PlanePoint:
    """w/(1-w): inverse of mobius_to_disk."""
    return _mobius(p, lambda w: w, lambda w: 1.0 - w, complex(-1.0, 0.0))


# ---------------------------------------------------------------------------
# The cusp squeeze
# ---------------------------------------------------------------------------

def inner_angle_map(theta: float, half_angle: float) -> float:
    """Inner-sector angle map: compress (-pi/2, pi/2) into the cusp opening."""
    return (2.0 * theta / math.pi) * half_angle


def outer_angle_map(theta: float, half_angle: float) -> float:
    """Outer-sector angle map: stretch [pi/2, 3pi/2] over the remaining arc."""
    return 2.0 * theta - math.pi + (2.0 - 2.0 * theta / math.pi) * half_angle


def squeeze_angle(p: PolarPoint, half_angle: float) -> float:
    """Image polar angle of the squeeze at seam half-opening `half_angle`.

    Inner rays compress linearly into (-half_angle, half_angle); outer rays
    stretch over the remaining arc. Both formulas agree at the seams.
    """
    if p.sector is Sector.INNER:
        return inner_angle_map(p.theta, half_angle)
    return outer_angle_map(p.outer_angle(), half_angle)


def cusp_map(p: PolarPoint, params: ProfileParams) -> PlanePoint:
    """The squeeze stage on the whole plane (radial extension beyond r = 1)."""
    if p.r == 0.0:
        return ORIGIN
    if p.r <= 1.0:
        prof = evaluate(p.r, params)
        rho = prof.image_radius
    else:
        prof = evaluate(1.0, params)
        rho = p.r * prof.image_radius
    phi = squeeze_angle(p, prof.half_angle)
    return PlanePoint(rho * math.cos(phi), rho * math.sin(phi))


def _invert_angle(phi: float, half_angle: float) -> PolarPoint:
    """Solve squeeze_angle(theta) = phi at fixed half-opening; returns r=1 shell."""
    # normalize the image angle into [-half_angle, 2 pi - half_angle)
    t = math.fmod(phi + half_angle, _TWO_PI)
    if t < 0.0:
        t += _TWO_PI
    phi = t - half_angle
    if abs(phi) < half_angle:
        theta = phi * math.pi / (2.0 * half_angle)
    else:
        # seam angles land here and map to theta = +-pi/2 exactly
        po = phi if phi >= half_angle else phi + _TWO_PI
        theta = (po + math.pi - 2.0 * half_angle) / (2.0 - 2.0 * half_angle / math.pi)
    return PolarPoint.from_angle(1.0, theta)


# floor below which an image radius cannot be matched by a double radius
_LOG_R_FLOOR = math.log(1e-320)


def cusp_map_inv(
    w: PlanePoint,
    params: ProfileParams,
    r_extension_max: float = 1e6,
    max_iterations: int = 200,
) -> PolarPoint:
    """Invert the squeeze: monotone image-radius bisection, linear angle solve.

    The radius bisection runs on log r (uniform relative precision down to the
    double-precision floor). Image radii below the floor or above the
    configured extension range raise RangeError.
    """
    if w.at_infinity or w.norm() == 0.0:
        raise RangeError("inverse squeeze needs a finite nonzero image point")
    rho = w.norm()
    one = evaluate(1.0, params)
    if rho > one.image_radius * (1.0 + 1e-15):
        r = rho / one.image_radius
        if r > r_extension_max:
            raise RangeError(f"image radius {rho} beyond the configured extension range")
        inv = _invert_angle(math.atan2(w.x2, w.x1), one.half_angle)
        return PolarPoint(r, inv.theta, inv.sector)

    lo, hi = _LOG_R_FLOOR, 0.0
    glo = evaluate(math.exp(lo), params).image_radius
    if rho < glo:
        raise RangeError(
            f"image radius {rho} below the double-precision radius floor ({glo:.6g})"
        )
    iterations = 0
    while hi - lo > 1e-15 * (1.0 + abs(lo)):
        iterations += 1
        if iterations > max_iterations:
            raise ConvergenceError("image-radius bisection exceeded its iteration budget")
        mid = 0.5 * (lo + hi)
        if evaluate(math.exp(mid), params).image_radius < rho:
            lo = mid
        else:
            hi = mid
    r = math.exp(0.5 * (lo + hi))
    prof = evaluate(r, params)
    inv = _invert_angle(math.atan2(w.x2, w.x1), prof.half_angle)
    return PolarPoint(r, inv.theta, inv.sector)


# ---------------------------------------------------------------------------
# Chain composition
# ---------------------------------------------------------------------------

def _apply_stage(p: PlanePoint, stage: MapStage, params: ProfileParams) -> PlanePoint:
    if stage is MapStage.DISK_TO_HALFPLANE:
        return mobius_to_halfplane(p)
    if stage is MapStage.HALFPLANE_TO_DISK:
        return mobius_to_disk(p)
    if p.at_infinity:
        return p  # the squeeze extension fixes infinity
    return cusp_map(PolarPoint.from_plane(p), params)


def _apply_stage_inv(p: PlanePoint, stage: MapStage, params: ProfileParams) -> PlanePoint:
    if stage is MapStage.DISK_TO_HALFPLANE:
        return mobius_to_halfplane_inv(p)
    if stage is MapStage.HALFPLANE_TO_DISK:
        return mobius_to_disk_inv(p)
    if p.at_infinity:
        return p
    if p.norm() == 0.0:
        return ORIGIN
    q = cusp_map_inv(p, params)
    return PlanePoint(q.r * math.cos(q.theta), q.r * math.sin(q.theta))


def apply_chain(x: PlanePoint, chain: MapChain) -> PlanePoint:
    for stage in chain.stages:
        x = _apply_stage(x, stage, chain.params)
    return x


def apply_chain_inv(w: PlanePoint, chain: MapChain) -> PlanePoint:
    for stage in reversed(chain.stages):
        w = _apply_stage_inv(w, stage, chain.params)
    return w


# ---------------------------------------------------------------------------
# Image-boundary asymptotics near the cusp tip
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceRow:
    """Image of the cusp-boundary point (t, e^{-1/t}) under the final stage."""

    t: float
    x1: float
    x2: float
    residual: float  # x1 - t, expected O(t^2)


def boundary_image_trace(t_values) -> list:
    """Trace how the final Mobius stage bends the cusp boundary near the tip."""
    rows = []
    for t in t_values:
        if not (0.0 < t < 1.0):
            raise DomainError(f"trace parameter {t!r} outside (0, 1)")
        try:
            y = math.exp(-1.0 / t)
        except OverflowError:
            y = 0.0
        z = complex(t, y) / complex(1.0 + t, y)
        rows.append(TraceRow(t=t, x1=z.real, x2=z.imag, residual=z.real - t))
    return rows


def fit_tip_curvature(rows, window) -> float:
    """Least-squares constant C in |residual| <= C t^2 over a t-window."""
    lo, hi = window
    num = sum(abs(r.residual) * r.t**2 for r in rows if lo <= r.t <= hi)
    den = sum(r.t**4 for r in rows if lo <= r.t <= hi)
    if den == 0.0:
        raise DomainError(f"no trace rows inside window [{lo}, {hi}]")
    return num / den
