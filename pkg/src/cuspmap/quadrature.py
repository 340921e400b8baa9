"""Annular quadrature of distortion fields and integrability classification.

Integration happens in the squeeze's source polar plane around the singular
point, where the distortion is an exact closed form of (log r, theta). Annuli
refine dyadically toward the singularity; each annulus is integrated by
tensor Gauss-Legendre in (log r, theta), splitting the angular range at the
sector seams where the integrand kinks.

exp(lambda*K) reaches astronomical values long before the interesting regime,
so those integrals accumulate in log space (per-annulus log-sum-exp of node
contributions, max-shift combination across annuli). Schemes address annuli
by log2 of the inner radius and may descend far below the double-precision
radius floor: the integrand needs only log r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, InsufficientData, NodeError
from .maps import MapChain
from .distortion import distortion_values

__all__ = [
    "Verdict",
    "AnnularScheme",
    "IntegrabilityReport",
    "integrate_annulus",
    "distortion_power_integral",
    "distortion_exp_integral",
    "classify",
]

_HALF_PI = math.pi / 2.0
_LOG2 = math.log(2.0)
_SECTORS = ((-_HALF_PI, _HALF_PI), (_HALF_PI, 3.0 * _HALF_PI))


class Verdict(Enum):
    CONVERGENT = "convergent"
    DIVERGENT = "divergent"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class AnnularScheme:
    """Dyadic-style refinement toward the singular point.

    log2_eps lists the inner radii of the partial integrals as log2 values,
    strictly decreasing; each consecutive pair is one reporting annulus,
    subdivided into `annuli_per_step` equal log-width bands for quadrature.
    """

    log2_eps: tuple
    annuli_per_step: int = 1
    radial_nodes: int = 8
    angular_nodes: int = 16

    def __post_init__(self):
        object.__setattr__(self, "log2_eps", tuple(float(v) for v in self.log2_eps))
        if len(self.log2_eps) < 2 or np.any(np.diff(self.log2_eps) >= 0.0):
            raise DomainError("log2_eps must be strictly decreasing with >= 2 entries")
        if self.log2_eps[0] > 0.0:
            raise DomainError("the outermost radius must be <= 1")
        if self.annuli_per_step < 1 or self.radial_nodes < 2 or self.angular_nodes < 2:
            raise DomainError("node and subdivision counts must be >= 2 (subdivision >= 1)")

    @property
    def eps_list(self) -> tuple:
        """Inner radii as doubles; underflows to 0 for very deep schemes."""
        with np.errstate(under="ignore"):
            return tuple(float(2.0**v) for v in self.log2_eps)

    @classmethod
    def dyadic(cls, depth: int = 64, annuli_per_step: int = 1,
               radial_nodes: int = 8, angular_nodes: int = 16) -> "AnnularScheme":
        """Octave-by-octave refinement: eps = 2^-1, ..., 2^-depth."""
        return cls(tuple(float(-k) for k in range(0, depth + 1)),
                   annuli_per_step, radial_nodes, angular_nodes)

    @classmethod
    def geometric(cls, max_depth: float, steps: int = 48, annuli_per_step: int = 1,
                  radial_nodes: int = 8, angular_nodes: int = 16) -> "AnnularScheme":
        """Geometrically deepening exponents: reaches 2^-max_depth in `steps`."""
        ks = -np.geomspace(1.0, max_depth, steps)
        return cls((0.0,) + tuple(ks), annuli_per_step, radial_nodes, angular_nodes)


def integrate_annulus(field, r_in: float, r_out: float,
                      radial_nodes: int = 16, angular_nodes: int = 16,
                      theta_range=(-_HALF_PI, 3.0 * _HALF_PI)) -> float:
    """Tensor Gauss-Legendre value of the area integral of `field` over an annulus.

    `field(r, theta)` must be finite on the closed annulus; the angular range
    splits at the sector seam pi/2 when it crosses it.
    """
    if not (0.0 < r_in < r_out):
        raise DomainError(f"need 0 < r_in < r_out, got ({r_in}, {r_out})")
    xr, wr = np.polynomial.legendre.leggauss(radial_nodes)
    xt, wt = np.polynomial.legendre.leggauss(angular_nodes)
    rs = 0.5 * (r_out - r_in) * (xr + 1.0) + r_in
    wrs = 0.5 * (r_out - r_in) * wr
    t0, t1 = theta_range
    cuts = [t0] + [c for c in (_HALF_PI,) if t0 < c < t1] + [t1]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        ts = 0.5 * (b - a) * (xt + 1.0) + a
        wts = 0.5 * (b - a) * wt
        vals = np.array([[field(r, t) for t in ts] for r in rs], dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NodeError("field evaluated non-finite at a quadrature node")
        total += float(np.einsum("i,j,ij->", wrs * rs, wts, vals))
    return total


def _log_annulus_contribs(u_in, u_out, bands, nr, nt, log_field):
    """Per-node log contributions of int exp(log_field) * r dr dtheta.

    Substituting r = e^u turns the area element into e^{2u} du dtheta. Returns
    a flat array of log(node term); the annulus value is logsumexp of it.
    """
    xu, wu = np.polynomial.legendre.leggauss(nr)
    xt, wt = np.polynomial.legendre.leggauss(nt)
    edges = np.linspace(u_in, u_out, bands + 1)
    pieces = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        us = 0.5 * (hi - lo) * (xu + 1.0) + lo
        lwu = np.log(0.5 * (hi - lo) * wu)
        for a, b in _SECTORS:
            ts = 0.5 * (b - a) * (xt + 1.0) + a
            lwt = np.log(0.5 * (b - a) * wt)
            lf = log_field(us[:, None], ts[None, :])
            pieces.append((lf + 2.0 * us[:, None] + lwu[:, None] + lwt[None, :]).ravel())
    return np.concatenate(pieces)


def _logsumexp(values: np.ndarray) -> float:
    m = float(np.max(values))
    if not math.isfinite(m):
        return m
    return m + math.log(float(np.sum(np.exp(values - m))))


@dataclass(frozen=True)
class IntegrabilityReport:
    """Partial integrals toward the singularity with a growth verdict.

    partials: (eps, I(eps)) pairs, eps decreasing; I nondecreasing. For
    exp-integrals the linear values may overflow to inf; log_partials always
    carries the exact log values. ratio_stats are the successive-increment
    ratios feeding the classifier.
    """

    kind: str
    parameter: float
    partials: tuple
    log_partials: tuple
    ratio_stats: tuple
    verdict: Verdict


def _report(kind, parameter, scheme, log_increments) -> IntegrabilityReport:
    log_partials = []
    acc = -math.inf
    for li in log_increments:
        acc = li if acc == -math.inf else max(acc, li) + math.log1p(math.exp(-abs(acc - li)))
        log_partials.append(acc)
    with np.errstate(over="ignore", under="ignore"):
        partials = tuple(
            (float(2.0 ** scheme.log2_eps[i + 1]), float(np.exp(lp)))
            for i, lp in enumerate(log_partials)
        )
    ratios = _increment_ratios(log_increments)
    return IntegrabilityReport(
        kind=kind,
        parameter=parameter,
        partials=partials,
        log_partials=tuple(log_partials),
        ratio_stats=ratios,
        verdict=_verdict_from_ratios(ratios, len(log_partials)),
    )


def _increment_ratios(log_increments) -> tuple:
    out = []
    for prev, cur in zip(log_increments[:-1], log_increments[1:]):
        if cur == -math.inf:  # increment vanished (possibly below one ulp)
            out.append(0.0)
        elif prev == -math.inf:
            out.append(math.inf)
        else:
            d = cur - prev
            out.append(math.inf if d > 700.0 else math.exp(d))
    return tuple(out)


def _verdict_from_ratios(ratios, n_partials) -> Verdict:
    if n_partials < 6:
        raise InsufficientData(f"classifier needs >= 6 partials, got {n_partials}")
    tail = ratios[-3:]
    if all(r <= 0.9 for r in tail):
        return Verdict.CONVERGENT
    if all(r >= 1.1 for r in tail):
        return Verdict.DIVERGENT
    return Verdict.INCONCLUSIVE


def classify(partials, log_domain: bool = False) -> Verdict:
    """Growth verdict from (eps, value) partial integrals, eps decreasing.

    Convergent when the last three increments each shrink by factor <= 0.9,
    divergent when each grows by factor >= 1.1, inconclusive otherwise.
    """
    if len(partials) < 6:
        raise InsufficientData(f"classifier needs >= 6 partials, got {len(partials)}")
    values = [v for _, v in partials]
    if log_domain:
        log_inc = [values[0]]
        for prev, cur in zip(values[:-1], values[1:]):
            if cur < prev:
                raise DomainError("log-partials must be nondecreasing")
            gap = prev - cur  # <= 0
            log_inc.append(-math.inf if gap == 0.0 else cur + math.log1p(-math.exp(gap)))
    else:
        inc = [values[0]] + list(np.diff(values))
        if any(v < 0.0 for v in inc):
            raise DomainError("partials must be nondecreasing")
        log_inc = [math.log(v) if v > 0.0 else -math.inf for v in inc]
    return _verdict_from_ratios(_increment_ratios(log_inc), len(partials))


def _chain_log_field(chain: MapChain):
    """log K(u, theta) with u = log r; identically 0 without the squeeze."""
    if not chain.has_cusp():
        return lambda u, t: np.zeros(np.broadcast_shapes(np.shape(u), np.shape(t)))
    params = chain.params
    return lambda u, t: np.log(distortion_values(u, t, params))


def _integral_report(kind, parameter, transform, scheme, chain) -> IntegrabilityReport:
    log_k = _chain_log_field(chain)

    def log_integrand(u, t):
        return transform(log_k(u, t))

    log_increments = []
    for k0, k1 in zip(scheme.log2_eps[:-1], scheme.log2_eps[1:]):
        contribs = _log_annulus_contribs(
            k1 * _LOG2, k0 * _LOG2, scheme.annuli_per_step,
            scheme.radial_nodes, scheme.angular_nodes, log_integrand,
        )
        if np.any(np.isnan(contribs)):
            raise NodeError("non-finite integrand at a quadrature node")
        log_increments.append(_logsumexp(contribs))
    return _report(kind, parameter, scheme, log_increments)


def distortion_power_integral(p: float, scheme: AnnularScheme, chain: MapChain) -> IntegrabilityReport:
    """Partial integrals of K^p over shrinking annuli at the singular point."""
    if not (p > 0.0):
        raise DomainError(f"exponent must be positive, got {p}")
    return _integral_report("K^p", p, lambda lk: p * lk, scheme, chain)


def distortion_exp_integral(lam: float, scheme: AnnularScheme, chain: MapChain) -> IntegrabilityReport:
    """Partial integrals of exp(lambda K), accumulated in log space."""
    if not (lam > 0.0):
        raise DomainError(f"lambda must be positive, got {lam}")
    return _integral_report("exp(lambda K)", lam, lambda lk: lam * np.exp(lk), scheme, chain)
