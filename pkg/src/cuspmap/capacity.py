"""Weighted 2-capacity: explicit test functions, closed-form bounds, grid solves.

Three layers:

  * the explicit Lipschitz test function on the exponential-cusp domain and
    its exact Dirichlet energy (a reciprocal of an integral of e^{1/t}; the
    energy decays faster than every power of the cutoff, so values are kept
    in log space alongside doubles);

  * closed-form bound evaluators with all unspecified constants exposed as
    parameters defaulting to 1;

  * a deterministic 5-point grid minimizer of the weighted Dirichlet energy
    (weight sampled at edge midpoints, conjugate-gradient solve from a zero
    start), plus the pullback capacity experiment toward the cusp tip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .distortion import chain_distortion_values
from .domains import ExpCuspDomain, arc_diameter, preimage_arc
from .errors import ConvergenceError, DomainError, MaskError
from .maps import MapChain, PlanePoint

__all__ = [
    "CapacityMethod",
    "CapacityEstimate",
    "CuspTestFunction",
    "cusp_test_energy",
    "DecayCheck",
    "DecayReport",
    "superpolynomial_decay_check",
    "GridSolverConfig",
    "Grid2D",
    "grid_capacity",
    "annulus_condenser",
    "capacity_lower_bound",
    "preimage_diameter_bound",
    "preimage_diameter_bound_log",
    "ExperimentRow",
    "tip_capacity_experiment",
]


class CapacityMethod(Enum):
    CLOSED_FORM = "closed-form"
    GRID_SOLVE = "grid-solve"


@dataclass(frozen=True)
class CapacityEstimate:
    """Capacity value with provenance; log_value stays finite past underflow."""

    value: float
    method: CapacityMethod
    weight_desc: str
    pair_desc: str
    log_value: float = None

    def __post_init__(self):
        if self.log_value is None:
            object.__setattr__(
                self, "log_value", math.log(self.value) if self.value > 0.0 else -math.inf
            )


# ---------------------------------------------------------------------------
# The explicit test function and its energy
# ---------------------------------------------------------------------------

def _log_width_integral(a: float, b: float) -> float:
    """log of int_a^b e^{1/t} dt, to ~1e-10 relative accuracy.

    Substituting s = 1/t gives int e^s / s^2 ds over [1/b, 1/a]; panels of
    bounded width in s with Gauss nodes keep the exponential tame, and the
    panel contributions combine by log-sum-exp.
    """
    if not (0.0 < a < b):
        raise DomainError(f"need 0 < a < b, got ({a}, {b})")
    s_lo, s_hi = 1.0 / b, 1.0 / a
    panels = max(8, int(math.ceil((s_hi - s_lo) / 4.0)))
    edges = np.linspace(s_lo, s_hi, panels + 1)
    xg, wg = np.polynomial.legendre.leggauss(16)
    logs = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        s = 0.5 * (hi - lo) * (xg + 1.0) + lo
        lw = math.log(0.5 * (hi - lo))
        logs.append(s - 2.0 * np.log(s) + np.log(wg) + lw)
    allv = np.concatenate(logs)
    m = float(np.max(allv))
    return m + math.log(float(np.sum(np.exp(allv - m))))


@dataclass(frozen=True)
class CuspTestFunction:
    """Lipschitz test function: 1 near the tip, 0 past half the separation.

    r is the inner cutoff, d = min(1, distance of the far set from the tip);
    admissible for any condenser pairing the tip arc against that far set.
    """

    r: float
    d: float

    def __post_init__(self):
        if not (0.0 < self.r < self.d / 2.0):
            raise DomainError(f"need 0 < r < d/2, got r={self.r}, d={self.d}")

    def value(self, x: PlanePoint, domain: ExpCuspDomain = ExpCuspDomain()) -> float:
        if not domain.contains(x):
            raise DomainError(f"test function evaluated outside the cusp domain: {x}")
        if x.x1 <= self.r:
            return 1.0
        if x.x1 > self.d / 2.0:
            return 0.0
        num = _log_width_integral(self.r, x.x1)
        den = _log_width_integral(self.r, self.d / 2.0)
        return 1.0 - math.exp(num - den)


def cusp_test_energy(r: float, d: float) -> CapacityEstimate:
    """Exact Dirichlet energy of the test function: 1 / int_r^{d/2} e^{1/t} dt.

    The double value underflows to 0 for r below ~0.0007; log_value is exact
    regardless.
    """
    if not (0.0 < r < d / 2.0 <= 0.5):
        raise DomainError(f"need 0 < r < d/2 <= 1/2, got r={r}, d={d}")
    log_energy = -_log_width_integral(r, d / 2.0)
    with np.errstate(under="ignore"):
        value = float(np.exp(log_energy))
    return CapacityEstimate(
        value=value,
        method=CapacityMethod.CLOSED_FORM,
        weight_desc="unweighted",
        pair_desc=f"tip arc within {r} vs far set at distance {d}",
        log_value=log_energy,
    )


@dataclass(frozen=True)
class DecayCheck:
    s: float
    log_ratios: tuple
    passed: bool


@dataclass(frozen=True)
class DecayReport:
    checks: tuple
    passed: bool


def superpolynomial_decay_check(s_list, r_list, d: float = 1.0, log_energy_fn=None) -> DecayReport:
    """Check energy(r) / r^s -> 0 for every s, on log scale.

    A check passes when the tail of the log-ratio sequence decreases
    monotonically and ends below its start. log_energy_fn can substitute a
    surrogate energy (negative controls).
    """
    rs = [float(r) for r in r_list]
    if len(rs) < 4 or any(b >= a for a, b in zip(rs[:-1], rs[1:])):
        raise DomainError("r_list must be strictly decreasing with >= 4 entries")
    if any(not (0.0 < r < 0.25) for r in rs):
        raise DomainError("cutoffs must lie in (0, 1/4)")
    if log_energy_fn is None:
        log_energy_fn = lambda r: cusp_test_energy(r, d).log_value
    checks = []
    for s in s_list:
        lr = [log_energy_fn(r) - s * math.log(r) for r in rs]
        tail = lr[len(lr) // 2 :]
        decreasing = all(b < a for a, b in zip(tail[:-1], tail[1:]))
        checks.append(DecayCheck(s=float(s), log_ratios=tuple(lr),
                                 passed=bool(decreasing and lr[-1] < lr[0])))
    return DecayReport(checks=tuple(checks), passed=all(c.passed for c in checks))


# ---------------------------------------------------------------------------
# Grid solver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSolverConfig:
    resolution: int = 256          # cells per unit length
    tolerance: float = 1e-8        # relative residual target
    max_iterations: int = 50000

    def __post_init__(self):
        if self.resolution < 16:
            raise DomainError("resolution must be >= 16 cells per unit")
        if not (self.tolerance > 0.0):
            raise DomainError("tolerance must be positive")


@dataclass(frozen=True)
class Grid2D:
    """Uniform node grid: node (i, j) sits at (x0 + i h, y0 + j h)."""

    x0: float
    y0: float
    h: float
    nx: int
    ny: int

    def nodes(self):
        xs = self.x0 + self.h * np.arange(self.nx)
        ys = self.y0 + self.h * np.arange(self.ny)
        return np.meshgrid(xs, ys, indexing="ij")

    @classmethod
    def square(cls, half_extent: float, resolution: int) -> "Grid2D":
        h = 1.0 / resolution
        n = 2 * int(math.ceil(half_extent / h)) + 1
        x0 = -h * (n - 1) / 2.0
        return cls(x0=x0, y0=x0, h=h, nx=n, ny=n)


def _edge_midpoint_weights(grid: Grid2D, weight):
    """Weight arrays on x-edges (nx-1, ny) and y-edges (nx, ny-1)."""
    X, Y = grid.nodes()
    if weight is None:
        return np.ones((grid.nx - 1, grid.ny)), np.ones((grid.nx, grid.ny - 1))
    wx = weight(0.5 * (X[:-1, :] + X[1:, :]), 0.5 * (Y[:-1, :] + Y[1:, :]))
    wy = weight(0.5 * (X[:, :-1] + X[:, 1:]), 0.5 * (Y[:, :-1] + Y[:, 1:]))
    return np.asarray(wx, dtype=float), np.asarray(wy, dtype=float)


def _dirichlet_operator(wx, wy, free, fixed_vals):
    """Returns apply(u_free) and the right-hand side for the 5-point stencil."""

    def weighted_laplacian(u):
        out = np.zeros_like(u)
        fx = wx * (u[1:, :] - u[:-1, :])
        out[:-1, :] += fx
        out[1:, :] -= fx
        fy = wy * (u[:, 1:] - u[:, :-1])
        out[:, :-1] += fy
        out[:, 1:] -= fy
        return out

    b = weighted_laplacian(fixed_vals)

    def apply_free(u):
        return np.where(free, -weighted_laplacian(np.where(free, u, 0.0)), 0.0)

    return apply_free, np.where(free, b, 0.0)


def grid_capacity(weight, F_mask, E_mask, domain_mask, grid: Grid2D,
                  cfg: GridSolverConfig) -> CapacityEstimate:
    """Minimize the discrete weighted Dirichlet energy with u=0 on F, u=1 on E.

    5-point stencil; `weight` is weight(x, y) vectorized over arrays (None for
    the unweighted problem), sampled at edge midpoints. Edges with either end
    outside the domain are dropped (natural boundary). Deterministic CG from
    a zero start. In two dimensions the grid spacing cancels: the energy is a
    plain weighted sum of squared differences.
    """
    F = np.asarray(F_mask, bool)
    E = np.asarray(E_mask, bool)
    dom = np.asarray(domain_mask, bool)
    if F.shape != (grid.nx, grid.ny) or E.shape != F.shape or dom.shape != F.shape:
        raise MaskError("mask shapes must match the grid")
    if not F.any() or not E.any():
        raise MaskError("both condenser plates must be nonempty")
    if (F & E).any():
        raise MaskError("condenser plates overlap")
    if (F & ~dom).any() or (E & ~dom).any():
        raise MaskError("plates must be contained in the domain")

    wx, wy = _edge_midpoint_weights(grid, weight)
    if np.any(~np.isfinite(wx)) or np.any(~np.isfinite(wy)) or np.any(wx < 0) or np.any(wy < 0):
        raise MaskError("weight must be finite and nonnegative on the grid")
    # deactivate edges leaving the domain
    wx = wx * (dom[:-1, :] & dom[1:, :])
    wy = wy * (dom[:, :-1] & dom[:, 1:])

    free = dom & ~F & ~E
    fixed = np.where(E, 1.0, 0.0)
    apply_free, b = _dirichlet_operator(wx, wy, free, fixed)

    u = np.zeros_like(fixed)
    r = b - apply_free(u)
    p = r.copy()
    rs = float(np.sum(r * r))
    b_norm = math.sqrt(float(np.sum(b * b)))
    threshold = cfg.tolerance * max(b_norm, 1e-300)
    iterations = 0
    while math.sqrt(rs) > threshold:
        if iterations >= cfg.max_iterations:
            raise ConvergenceError(
                f"CG residual {math.sqrt(rs):.3e} above {threshold:.3e} "
                f"after {cfg.max_iterations} iterations"
            )
        ap = apply_free(p)
        alpha = rs / float(np.sum(p * ap))
        u += alpha * p
        r -= alpha * ap
        rs_new = float(np.sum(r * r))
        p = r + (rs_new / rs) * p
        rs = rs_new
        iterations += 1

    full = np.where(free, u, fixed)
    energy = float(np.sum(wx * (full[1:, :] - full[:-1, :]) ** 2)
                   + np.sum(wy * (full[:, 1:] - full[:, :-1]) ** 2))
    return CapacityEstimate(
        value=energy,
        method=CapacityMethod.GRID_SOLVE,
        weight_desc="unweighted" if weight is None else "weighted",
        pair_desc=f"grid condenser ({int(F.sum())} vs {int(E.sum())} nodes)",
    )


def annulus_condenser(rho: float, R: float, resolution: int):
    """Grid and masks for the classical annulus condenser (F = inner disk)."""
    if not (0.0 < rho < R):
        raise DomainError(f"need 0 < rho < R, got ({rho}, {R})")
    grid = Grid2D.square(R * 1.02, resolution)
    X, Y = grid.nodes()
    rr = np.hypot(X, Y)
    dom = rr <= R + grid.h
    F = rr <= rho
    E = (rr >= R) & dom
    return grid, F, E, dom


# ---------------------------------------------------------------------------
# Closed-form bounds
# ---------------------------------------------------------------------------

def capacity_lower_bound(lam: float, exp_mass: float, diam_e: float, C: float = 1.0) -> float:
    """C * lam * (log(sqrt(4 L / pi) / diam E))^-2 with L the exp-distortion mass."""
    if not (lam > 0.0 and diam_e > 0.0 and exp_mass > 0.0):
        raise DomainError("lambda, diam E and the exponential mass must be positive")
    arg = math.sqrt(4.0 * exp_mass / math.pi) / diam_e
    if arg <= 1.0:
        raise DomainError(f"log argument must exceed 1, got {arg}")
    return C * lam * math.log(arg) ** -2.0


def preimage_diameter_bound_log(diam_eprime: float, lam: float, eps: float,
                                C: float = 1.0, Ctilde: float = 1.0) -> float:
    """log of C * exp(-Ctilde / diam'^{(1+eps)/lam}); finite past underflow."""
    if not all(v > 0.0 for v in (diam_eprime, lam, eps, C, Ctilde)):
        raise DomainError("all bound parameters must be positive")
    return math.log(C) - Ctilde * diam_eprime ** (-(1.0 + eps) / lam)


def preimage_diameter_bound(diam_eprime: float, lam: float, eps: float,
                            C: float = 1.0, Ctilde: float = 1.0) -> float:
    """The preimage-diameter lower bound; underflows to 0.0 when tiny."""
    lv = preimage_diameter_bound_log(diam_eprime, lam, eps, C, Ctilde)
    return math.exp(lv) if lv > -745.0 else 0.0


# ---------------------------------------------------------------------------
# Capacity experiment toward the cusp tip
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentRow:
    t: float
    diam_image_arc: float
    diam_preimage: float
    log_diam_preimage: float
    capacity: float
    capacity_over_t: float
    capacity_over_t2: float
    lower_bound_ref: float
    log_diam_bound: float


def tip_capacity_experiment(t_list, chain: MapChain, cfg: GridSolverConfig,
                            lam: float = 1.0, eps: float = 1.0,
                            arc_samples: int = 64) -> list:
    """Pullback condenser capacities for a shrinking tip arc.

    For each cutoff t: the image boundary arc within |w| <= t is pulled back
    to the source disk, paired against the central disk of radius 1/4, and
    the 1/K-weighted grid capacity of that condenser is solved. The row also
    carries both arc diameters (the preimage one additionally as a log value,
    since it collapses double-exponentially), the classical lower-bound
    formula evaluated with reference constants, and the log of the
    preimage-diameter bound.
    """
    ts = [float(t) for t in t_list]
    if len(ts) < 1 or any(b >= a for a, b in zip(ts[:-1], ts[1:])):
        raise DomainError("t_list must be strictly decreasing")
    if not chain.has_cusp():
        raise DomainError("experiment needs the full chain")

    grid = Grid2D.square(1.0, cfg.resolution)
    X, Y = grid.nodes()
    rr = np.hypot(X, Y)
    dom = rr < 1.0
    F = rr <= 0.25

    def weight(x, y):
        return 1.0 / chain_distortion_values(x + 1j * y, chain)

    rows = []
    for t in ts:
        arc = preimage_arc(t, chain, arc_samples)
        E = np.zeros_like(dom)
        for p in arc.samples:
            i = int(round((p.x1 - grid.x0) / grid.h))
            j = int(round((p.x2 - grid.y0) / grid.h))
            i = min(max(i, 0), grid.nx - 1)
            j = min(max(j, 0), grid.ny - 1)
            if not dom[i, j]:  # boundary samples: step inward toward the center
                i += 1 if p.x1 < 0 else -1
            if dom[i, j] and not F[i, j]:
                E[i, j] = True
        cap = grid_capacity(weight, F, E & ~F, dom, grid, cfg)
        d_img = arc_diameter(arc.image_samples)
        ref_mass = math.e * math.pi  # exp mass of a conformal reference map
        diam_for_bound = max(arc.diameter, math.exp(max(arc.log_diameter, -700.0)))
        rows.append(ExperimentRow(
            t=t,
            diam_image_arc=d_img,
            diam_preimage=arc.diameter,
            log_diam_preimage=arc.log_diameter,
            capacity=cap.value,
            capacity_over_t=cap.value / t,
            capacity_over_t2=cap.value / t**2,
            lower_bound_ref=capacity_lower_bound(lam, ref_mass, diam_for_bound),
            log_diam_bound=preimage_diameter_bound_log(d_img, lam, eps),
        ))
    return rows
