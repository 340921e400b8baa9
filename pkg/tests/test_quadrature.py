"""Annular quadrature and the integrability dichotomy."""

import math

import numpy as np
import pytest

from cuspmap import (
    AnnularScheme,
    DomainError,
    InsufficientData,
    MapChain,
    MapStage,
    NodeError,
    ProfileParams,
    Verdict,
    classify,
    distortion_exp_integral,
    distortion_power_integral,
    integrate_annulus,
)

CHAIN = MapChain.default()
CONFORMAL = MapChain(ProfileParams(), (MapStage.DISK_TO_HALFPLANE,))


def test_annulus_area():
    value = integrate_annulus(lambda r, t: 1.0, 0.5, 1.0, 24, 8)
    assert value == pytest.approx(3.0 * math.pi / 4.0, abs=1e-12)


def test_annulus_reciprocal_field():
    value = integrate_annulus(lambda r, t: 1.0 / r, 0.2, 0.7, 24, 8)
    assert value == pytest.approx(2.0 * math.pi * 0.5, abs=1e-10)


def test_annulus_inverse_square_field():
    value = integrate_annulus(lambda r, t: 1.0 / r**2, 0.2, 0.7, 24, 8)
    assert value == pytest.approx(2.0 * math.pi * math.log(0.7 / 0.2), abs=1e-10)


def test_annulus_guards():
    with pytest.raises(DomainError):
        integrate_annulus(lambda r, t: 1.0, 0.5, 0.2)
    with pytest.raises(NodeError):
        integrate_annulus(lambda r, t: math.nan, 0.2, 0.5)


def test_node_doubling_stability():
    from cuspmap.distortion import distortion_values

    field = lambda r, t: float(distortion_values(math.log(r), t, CHAIN.params))
    base = integrate_annulus(field, 2.0**-6, 2.0**-5, 8, 16)
    fine = integrate_annulus(field, 2.0**-6, 2.0**-5, 16, 32)
    assert abs(fine - base) / fine < 1e-3


def test_scheme_validation():
    with pytest.raises(DomainError):
        AnnularScheme((0.0, 0.0))
    with pytest.raises(DomainError):
        AnnularScheme((1.0, -1.0))
    with pytest.raises(DomainError):
        AnnularScheme((0.0, -1.0), radial_nodes=1)
    sch = AnnularScheme.dyadic(8)
    assert sch.eps_list[0] == 1.0 and sch.eps_list[-1] == 2.0**-8


def test_classify_examples():
    partials = [(2.0**-k, v) for k, v in enumerate(
        np.cumsum([1.0, 0.1, 0.01, 0.001, 1e-4, 1e-5]), start=1)]
    assert classify(partials) is Verdict.CONVERGENT
    partials = [(2.0**-k, v) for k, v in enumerate(
        np.cumsum([1.0, 2.0, 4.0, 8.0, 16.0, 32.0]), start=1)]
    assert classify(partials) is Verdict.DIVERGENT
    partials = [(2.0**-k, v) for k, v in enumerate(
        np.cumsum([1.0] * 7), start=1)]
    assert classify(partials) is Verdict.INCONCLUSIVE
    with pytest.raises(InsufficientData):
        classify([(0.5, 1.0), (0.25, 2.0)])


def test_classify_log_domain():
    logs = [float(v) for v in np.log(np.cumsum([1.0, 2.0, 4.0, 8.0, 16.0, 32.0]))]
    assert classify(list(zip([2.0**-k for k in range(1, 7)], logs)),
                    log_domain=True) is Verdict.DIVERGENT


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 4.0, 8.0])
def test_power_integrals_converge(p):
    rep = distortion_power_integral(p, AnnularScheme.dyadic(64), CHAIN)
    assert rep.verdict is Verdict.CONVERGENT
    assert rep.ratio_stats[-1] <= 0.9
    values = [v for _, v in rep.partials]
    assert all(b >= a for a, b in zip(values[:-1], values[1:]))
    # the report's verdict agrees with the public classifier on its partials
    assert classify(rep.partials) is Verdict.CONVERGENT


def test_exp_integral_divergent_at_unit_lambda():
    rep = distortion_exp_integral(1.0, AnnularScheme.dyadic(64), CHAIN)
    assert rep.verdict is Verdict.DIVERGENT
    assert all(b > a for a, b in zip(rep.log_partials[:-1], rep.log_partials[1:]))
    assert all(r >= 1.1 for r in rep.ratio_stats[-3:])


@pytest.mark.parametrize("lam", [0.01, 0.1])
def test_exp_integral_small_lambda_needs_deeper_radii(lam):
    # at 2^-64 the increments of these integrals still shrink: the growth
    # regime starts only near 2^-23000 (lam = 0.1) and 2^-10^46 (lam = 0.01)
    rep = distortion_exp_integral(lam, AnnularScheme.dyadic(64), CHAIN)
    assert rep.verdict is Verdict.CONVERGENT
    assert all(r < 1.0 for r in rep.ratio_stats[-3:])


def test_exp_integral_divergence_in_deep_log_schemes():
    deep = AnnularScheme.geometric(2.0**16, steps=40)
    assert distortion_exp_integral(0.1, deep, CHAIN).verdict is Verdict.DIVERGENT
    deeper = AnnularScheme.geometric(1e47, steps=40)
    assert distortion_exp_integral(0.01, deeper, CHAIN).verdict is Verdict.DIVERGENT
    # and the unit-lambda case stays divergent arbitrarily deep
    assert distortion_exp_integral(1.0, deep, CHAIN).verdict is Verdict.DIVERGENT


def test_conformal_chain_power_integral_gives_disk_area():
    rep = distortion_power_integral(2.0, AnnularScheme.dyadic(12), CONFORMAL)
    assert rep.verdict is Verdict.CONVERGENT
    assert rep.partials[-1][1] == pytest.approx(math.pi * (1.0 - 4.0**-12), rel=1e-12)


def test_conformal_chain_exp_integral_converges_to_e_pi():
    rep = distortion_exp_integral(1.0, AnnularScheme.dyadic(12), CONFORMAL)
    assert rep.verdict is Verdict.CONVERGENT
    assert rep.partials[-1][1] == pytest.approx(math.e * math.pi * (1.0 - 4.0**-12), rel=1e-12)


def test_refinement_stability_of_partials():
    base = distortion_power_integral(2.0, AnnularScheme.dyadic(16), CHAIN)
    fine = distortion_power_integral(
        2.0, AnnularScheme.dyadic(16, annuli_per_step=2, radial_nodes=16, angular_nodes=32),
        CHAIN)
    for (_, a), (_, b) in zip(base.partials, fine.partials):
        assert abs(a - b) / b < 5e-3


def test_parameter_guards():
    with pytest.raises(DomainError):
        distortion_power_integral(0.0, AnnularScheme.dyadic(8), CHAIN)
    with pytest.raises(DomainError):
        distortion_exp_integral(-1.0, AnnularScheme.dyadic(8), CHAIN)
