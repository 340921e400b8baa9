"""Radial profile: frozen multiprecision oracles, inverses, derivatives."""

import math

import numpy as np
import pytest

from cuspmap import DomainError, ProfileParams, depth, depth_inverse, evaluate
from cuspmap.profile import depth_inverse_log

P16 = ProfileParams(cg=16.0, r_max=1.0)
# wide enough to contain cg * e^-e where the depth equals 1 exactly
P16W = ProfileParams(cg=16.0, r_max=1.06)

# mpmath oracle, 50 digits, cg = 16, r = 1e-6
ORACLE_1E6 = {
    "depth": 0.3560384351450500019381287,
    "depth_rate": 7641.82593552554509376936,
    "aspect": 0.1693193101864174918404945,
    "aspect_rate": 6573.093523615853875742194,
    "image_radius": 0.3611060092669659348059291,
    "image_radius_rate": 8141.286492431123470726959,
    "half_angle": 0.1677285124026804574243757,
}


def test_depth_at_forced_unit_point():
    # loglog(cg/r) = 1 exactly at r = cg * e^-e
    r = 16.0 * math.exp(-math.e)
    assert depth(r, P16W) == pytest.approx(1.0, rel=1e-14)


def test_small_cusp_constant_rejected_at_unit_radius():
    # the classical constant 2 makes the depth negative at r = 1
    with pytest.raises(DomainError):
        ProfileParams(cg=2.0, r_max=1.0)


def test_depth_high_precision_value():
    assert depth(1e-10, P16) == pytest.approx(0.3076625816649012689928376, rel=1e-14)


def test_evaluate_against_multiprecision_oracle():
    e = evaluate(1e-6, P16)
    for name, want in ORACLE_1E6.items():
        assert getattr(e, name) == pytest.approx(want, rel=1e-9), name


def test_image_radius_rate_identity():
    # d/dr [depth * sqrt(1 + aspect^2)] expanded by the chain rule
    for r in (1e-9, 1e-3, 0.3, 0.99):
        e = evaluate(r, P16)
        expect = (
            e.depth_rate * (1.0 + e.aspect**2) + e.depth * e.aspect * e.aspect_rate
        ) / math.sqrt(1.0 + e.aspect**2)
        assert e.image_radius_rate == pytest.approx(expect, rel=1e-12)


def test_unit_depth_point_fields():
    r = 16.0 * math.exp(-math.e)
    e = evaluate(r, P16W)
    assert e.depth == pytest.approx(1.0, rel=1e-13)
    assert e.aspect == pytest.approx(math.exp(-1.0), rel=1e-13)
    assert e.half_angle == pytest.approx(math.atan(math.exp(-1.0)), rel=1e-13)


def test_field_invariants_on_log_grid():
    for r in np.geomspace(1e-300, 1.0, 40):
        e = evaluate(float(r), P16)
        assert e.depth > 0.0 and e.aspect > 0.0 and e.depth_rate > 0.0
        assert e.image_radius >= e.depth
        assert e.image_radius == pytest.approx(
            e.depth * math.sqrt(1.0 + e.aspect**2), rel=1e-12
        )
        assert all(map(math.isfinite, (e.depth_rate, e.aspect_rate, e.image_radius_rate)))


def test_derivatives_match_central_differences():
    for r in (1e-6, 1e-3, 0.05, 0.4, 0.9):
        e = evaluate(r, P16)
        h = r * 1e-6
        hi, lo = evaluate(r + h, P16), evaluate(r - h, P16)
        for field, rate in (
            ("depth", e.depth_rate),
            ("aspect", e.aspect_rate),
            ("image_radius", e.image_radius_rate),
        ):
            fd = (getattr(hi, field) - getattr(lo, field)) / (2.0 * h)
            assert rate == pytest.approx(fd, rel=1e-6), (field, r)


def test_monotonicity():
    rs = np.geomspace(1e-300, 1.0, 60)
    dvals = [depth(float(r), P16) for r in rs]
    gvals = [evaluate(float(r), P16).image_radius for r in rs]
    assert all(b > a for a, b in zip(dvals[:-1], dvals[1:]))
    assert all(b > a for a, b in zip(gvals[:-1], gvals[1:]))


def test_limits_toward_the_tip():
    assert depth(1e-100, P16) < depth(1e-10, P16) < 0.5
    assert evaluate(1e-100, P16).aspect < evaluate(1e-10, P16).aspect


def test_depth_inverse_unit_value():
    assert depth_inverse(1.0, P16W) == pytest.approx(16.0 * math.exp(-math.e), rel=1e-14)


def test_depth_inverse_half():
    # 16 * exp(-e^2)
    assert depth_inverse(0.5, P16) == pytest.approx(0.009887663829297495977912346, rel=1e-13)


def test_depth_round_trip():
    for r in np.geomspace(1e-300, 1.0, 25):
        g = depth(float(r), P16)
        assert depth_inverse(g, P16) == pytest.approx(float(r), rel=1e-12)


def test_depth_inverse_log_past_underflow():
    lg = depth_inverse_log(0.05, P16)
    assert lg == pytest.approx(math.log(16.0) - math.exp(20.0), rel=1e-15)
    assert depth_inverse(0.05, P16) == 0.0  # true radius far below subnormals


def test_domain_errors():
    with pytest.raises(DomainError):
        depth(0.0, P16)
    with pytest.raises(DomainError):
        depth(-1.0, P16)
    with pytest.raises(DomainError):
        depth(1.5, P16)
    with pytest.raises(DomainError):
        evaluate(2.0, P16)
    with pytest.raises(DomainError):
        depth_inverse(0.0, P16)
    with pytest.raises(DomainError):
        depth_inverse(depth(1.0, P16) * 1.01, P16)
