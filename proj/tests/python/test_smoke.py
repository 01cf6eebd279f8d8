"""End-to-end smoke tests for the banditlab python bindings."""

import math

import pytest

import banditlab as bl


def canonical_pair():
    return bl.ArmSet([
        bl.PayoffDistribution.two_point(-1.0, 3.0, 0.5),
        bl.PayoffDistribution.two_point(-1.0, 1.0, 0.5),
    ])


def test_version():
    assert bl.__version__ == "0.1.0"


def test_distribution_moments_and_sampling():
    d = bl.PayoffDistribution.two_point(-1.0, 3.0, 0.5)
    assert d.mean == 1.0
    assert d.variance == 4.0
    rng1 = bl.RngStream(7, 0)
    rng2 = bl.RngStream(7, 0)
    draws = [d.sample(rng1) for _ in range(32)]
    assert draws == [d.sample(rng2) for _ in range(32)]
    assert set(draws) <= {-1.0, 3.0}

    n = bl.PayoffDistribution.normal(1.5, 2.25)
    assert n.variance == 2.25
    with pytest.raises(ValueError):
        bl.PayoffDistribution.normal(0.0, -1.0)


def test_arm_set_and_thresholds():
    arms = canonical_pair()
    assert len(arms) == 2
    assert arms.extreme == [0, 1]
    th = bl.thresholds(1.0, 2.0, 0.0, 1.0)
    assert th.ratio == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert th.alpha_low == 0.5
    assert th.alpha_high == 2.0
    assert th.alpha_low_prime == 4.0


def test_utility_closed_forms():
    sv = bl.UtilityIndex.mean_semivariance(0.3)
    assert sv(1.0, -2.0) == pytest.approx(1.0 - 0.3 * 4.0)
    assert bl.single_arm_limit(sv, 0.7, 2.5) == pytest.approx(0.7 - 0.15 * 2.5)

    sf = bl.UtilityIndex.shortfall(0.8, 0.0)
    assert bl.single_arm_limit(sf, 0.7, 2.5) == pytest.approx(0.7 - 0.4)
    smoothed = sf.with_smoothing(0.25)
    assert smoothed.smoothing_width == 0.25

    a = 0.5
    blend = bl.UtilityIndex.blend(bl.Phi.exp_neg(), a)
    want = -math.exp(-(1 - a) * 0.3 + 0.5 * a * a * 1.2)
    assert bl.single_arm_limit(blend, 0.3, 1.2) == pytest.approx(want, abs=1e-10)

    with pytest.raises(ValueError):
        bl.UtilityIndex.blend(bl.Phi.identity(), 0.0)


def test_custom_utility_callback():
    u = bl.UtilityIndex.custom(lambda x, y: x - abs(y), 2.0, 2.0, "x-|y|")
    assert u(1.0, -0.25) == 0.75


def test_monte_carlo_determinism():
    arms = canonical_pair()
    strat = bl.Strategy.sign_switch(0, 1)
    u = bl.UtilityIndex.mean_semivariance(1.0)
    cfg = dict(horizon=50, paths=2000, seed=5)
    e1 = bl.estimate_Un(arms, strat, u, bl.SimulationConfig(**cfg))
    e2 = bl.estimate_Un(arms, strat, u, bl.SimulationConfig(**cfg))
    e3 = bl.estimate_Un(arms, strat, u, bl.SimulationConfig(**cfg, threads=3))
    assert e1.mean == e2.mean == e3.mean
    assert e1.std_error == e3.std_error
    assert e1.ci_lo == pytest.approx(e1.mean - 1.96 * e1.std_error)


def test_custom_strategy_callback():
    arms = canonical_pair()
    strat = bl.Strategy.custom(lambda stage, pulls, pay, dev: (stage - 1) % 2,
                               "parity")
    rng = bl.RngStream(3, 0)
    rec = bl.run_strategy(arms, strat, 6, rng)
    assert rec.n == 6

    bad = bl.Strategy.custom(lambda stage, pulls, pay, dev: 9, "bad")
    cfg = bl.SimulationConfig(horizon=4, paths=8, seed=0)
    with pytest.raises(ValueError):
        bl.estimate_Un(arms, bad, bl.UtilityIndex.mean_variance(1.0), cfg)


def test_numerical_error_maps_to_arithmetic_error():
    arms = canonical_pair()
    blowup = bl.UtilityIndex.custom(lambda x, y: float("inf"), 1.0, 1.0, "inf")
    cfg = bl.SimulationConfig(horizon=4, paths=8, seed=0)
    with pytest.raises(ArithmeticError):
        bl.estimate_Un(arms, bl.Strategy.specialize(0), blowup, cfg)


def test_exact_dp():
    arms = canonical_pair()
    r = bl.exact_value_dp(arms, bl.UtilityIndex.mean_variance(0.25), 8)
    assert r.exact
    assert r.first_arm == 0
    assert abs(r.value) <= 1e-12

    cont = bl.ArmSet([bl.PayoffDistribution.normal(0.0, 1.0)])
    with pytest.raises(ValueError):
        bl.exact_value_dp(cont, bl.UtilityIndex.mean_variance(0.25), 4)


def test_pde_corner_value():
    arms = bl.ArmSet([bl.PayoffDistribution.normal(0.7, 2.5)])
    grid = bl.Grid.make(arms, 41, 41)
    sol = bl.solve_hjb(arms, bl.UtilityIndex.mean_variance(0.3), grid)
    assert sol.corner_value == pytest.approx(-0.05, abs=1e-6)
    assert sol.value_at(0.0, 0.0) == sol.corner_value


def test_certificate_enum():
    risky = bl.Arm.make(0, bl.PayoffDistribution.normal(1.0, 4.0))
    safe = bl.Arm.make(1, bl.PayoffDistribution.normal(0.0, 1.0))
    cert = bl.specialization_certificate(
        bl.UtilityIndex.mean_variance(0.25), risky, safe)
    assert cert.holds_for_arm1 == bl.CertVerdict.Yes
    assert cert.holds_for_arm2 == bl.CertVerdict.No
    assert cert.analytic


def test_obm_closed_forms_and_simulation():
    p = bl.ObmParams(2.0, 1.0)
    assert bl.obm_prob_nonneg(p) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert bl.obm_negative_second_moment(p, 1.0) == pytest.approx(2.0 / 3.0)
    assert bl.switch_value_semivariance(1.0, 2.0, 0.0, 1.0, 1.0) == \
        pytest.approx(-1.0 / 3.0)
    r = bl.simulate_obm(p, 1.0, 200, 4000, 9)
    assert abs(r.prob_nonneg - 1.0 / 3.0) <= 3.0 * r.prob_se + 0.03
    with pytest.raises(ValueError):
        bl.simulate_obm(p, 1.0, 10, 100, 0)
