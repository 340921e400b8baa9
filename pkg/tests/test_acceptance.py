"""Acceptance gate: the ten certification criteria, one test each.

Each test executes the corresponding criterion from cuspmap.verify (the same
code the `cuspmap verify` command runs), prints its PASS/FAIL line, and
asserts it passed.

Three criteria (3, 5, 8) pin numerical targets that direct evaluation of the
constructed map contradicts; they are implemented exactly as stated and are
expected to report FAIL honestly:

  * criterion 3: the theta = pi envelope ratio converges to 2, not 0.5, and
    inner-sector ratios sink below the 0.05 floor for r < ~2e-20;
  * criterion 5: exp(lambda K) increments at radii >= 2^-64 still shrink for
    lambda in {0.01, 0.1} (growth starts near 2^-23000 and 2^-10^46; the
    deep-scheme tests in test_quadrature.py certify the divergence there);
  * criterion 8: the pulled-back boundary arc collapses double-exponentially
    below one grid cell, so the capacity column plateaus instead of decaying
    like t^s.
"""

from cuspmap.verify import run_criterion


def _run(index, tmp_path):
    res = run_criterion(index, out_dir=str(tmp_path))
    print()
    print(res.line())
    for key, value in res.details.items():
        print(f"    {key}: {value}")
    return res


def test_criterion_01_jacobian_fd_agreement(tmp_path):
    res = _run(1, tmp_path)
    assert res.details["worst_rel_deviation"] <= 1e-6
    assert res.passed


def test_criterion_02_homeomorphism_sanity(tmp_path):
    res = _run(2, tmp_path)
    assert res.details["worst_round_trip"] <= 1e-9
    assert res.details["worst_seam_gap"] <= 1e-12
    assert res.details["min_jacobian_det"] > 0.0
    assert res.passed


def test_criterion_03_distortion_envelope(tmp_path):
    res = _run(3, tmp_path)
    assert res.passed, (
        "stated targets are unattainable: the theta=pi ratio converges to "
        f"{res.details['theta_pi_ratio_at_1e-30']:.4f} (pinned: 0.5 +- 0.05) and the "
        f"sampled ratio range is [{res.details['ratio_min']:.4f}, "
        f"{res.details['ratio_max']:.4f}] (pinned band: [0.05, 2.0])"
    )


def test_criterion_04_power_integrability(tmp_path):
    res = _run(4, tmp_path)
    assert res.passed


def test_criterion_05_exp_divergence(tmp_path):
    res = _run(5, tmp_path)
    assert res.passed, (
        "stated targets are partially unattainable at eps = 2^-64: "
        f"verdicts {res.details['rows']} (pinned: all divergent; the lambda "
        "<= 0.1 growth regimes lie far below the scheme depth)"
    )


def test_criterion_06_test_function_decay(tmp_path):
    res = _run(6, tmp_path)
    assert res.details["all_pass"] and res.details["control_fails"]
    assert res.passed


def test_criterion_07_capacity_calibration(tmp_path):
    res = _run(7, tmp_path)
    errs = res.details["rel_errors"]
    assert errs[512] <= 0.02
    assert errs[128] > errs[256] > errs[512]
    assert res.passed


def test_criterion_08_tip_capacity_scaling(tmp_path):
    res = _run(8, tmp_path)
    assert res.details["monotone"], "capacity column must be monotone"
    assert res.passed, (
        "the decay target capacity(t)/t^s -> 0 is unattainable at grid "
        "resolution: the pulled-back arc freezes into a single cell "
        f"(capacities: {res.details['capacities']})"
    )


def test_criterion_09_boundary_asymptotics(tmp_path):
    res = _run(9, tmp_path)
    assert res.passed


def test_criterion_10_determinism(tmp_path):
    res = _run(10, tmp_path)
    assert res.details["mismatches"] == []
    assert res.passed
