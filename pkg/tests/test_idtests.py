import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rootident.errors import InconsistentDataError, InvalidArgumentError
from rootident.idtests import (ThreeErrorSpec, TwoErrorSpec, feasible_bounds, feasible_interval,
                               midrange_tail, run_test, run_three_error_test, run_two_error_test,
                               three_error_error_probability, two_error_miss_probability,
                               verdicts)
from rootident.model import UniformRootModel
from rootident.rng import uniforms


def rule_bit(spec, obs):
    """Decision rule written out from its definition, for the oracle only."""
    d = spec.delta
    lo = -obs.min(axis=-1) - d
    hi = -obs.max(axis=-1) + d
    if isinstance(spec, TwoErrorSpec):
        return (hi >= spec.a - spec.eps / 2) & (lo <= spec.b + spec.eps / 2)
    mid = (lo + hi) / 2
    return (mid >= spec.a - spec.eps2 + spec.eps1 / 2) & (mid <= spec.b + spec.eps2 - spec.eps1 / 2)


def grid_probability(spec, kappa, bit, k):
    """Brute-force midpoint-rule integral of P(verdict == bit) over the observation cube."""
    lo = -kappa - spec.delta
    h = 2 * spec.delta / k
    axis = lo + h * (np.arange(k) + 0.5)
    mesh = np.stack(np.meshgrid(*[axis] * spec.n, indexing="ij"), axis=-1)
    return float(np.mean(rule_bit(spec, mesh) == bit))


def model_verdicts(spec, kappa, trials, seed=0):
    u = uniforms(seed, np.arange(trials), spec.n)
    obs = UniformRootModel(kappa, spec.delta).from_uniforms(0.0, u)
    lo, hi, ok = feasible_bounds(obs, spec.delta)
    assert ok.all()
    return lo, hi, verdicts(spec, lo, hi)


def test_feasible_interval_examples():
    iv = feasible_interval([0.0], 0.5)
    assert (iv.lo, iv.hi) == (-0.5, 0.5)
    iv = feasible_interval([-1.2, -0.8], 0.5)
    assert iv.lo == pytest.approx(0.7) and iv.hi == pytest.approx(1.3)
    with pytest.raises(InconsistentDataError):
        feasible_interval([0.0, 2.0], 0.5)
    with pytest.raises(InvalidArgumentError):
        feasible_interval([], 0.5)


def test_two_error_in_target_always_accepts():
    spec = TwoErrorSpec(0, 1, 0.5, 0.5, 2)
    _, _, v = model_verdicts(spec, 0.5, 50_000)
    assert v.all()


def test_two_error_single_observation_miss_probability_by_integration():
    spec = TwoErrorSpec(0, 1, 0.5, 0.5, 1)
    p = grid_probability(spec, -0.5, 1, 100_000)
    assert p == pytest.approx(0.75, abs=1e-4)
    assert two_error_miss_probability(0.5, 0.5, 1) == pytest.approx(0.75)


@pytest.mark.parametrize("eps,delta", [(0.5, 0.5), (0.3, 0.4)])
def test_two_error_miss_probability_two_observations(eps, delta):
    spec = TwoErrorSpec(0, 1, eps, delta, 2)
    p = grid_probability(spec, -eps, 1, 2000)
    assert p == pytest.approx(two_error_miss_probability(eps, delta, 2), abs=2e-3)


def test_two_error_far_observations_reject():
    spec = TwoErrorSpec(0, 1, 0.5, 0.5, 3)
    assert run_two_error_test(spec, [10, 10.1, 10.2]).bit == 0


def test_wrong_observation_count():
    with pytest.raises(InvalidArgumentError):
        run_two_error_test(TwoErrorSpec(0, 1, 0.5, 0.5, 3), [0.0, 0.1])


def test_spec_domains():
    with pytest.raises(InvalidArgumentError):
        TwoErrorSpec(0, 1, 1.1, 0.5, 2)
    with pytest.raises(InvalidArgumentError):
        TwoErrorSpec(1, 0, 0.1, 0.5, 2)
    with pytest.raises(InvalidArgumentError):
        ThreeErrorSpec(0, 1, 0.25, 0.5, 0.5, 2)  # 2*eps1 == eps2
    with pytest.raises(InvalidArgumentError):
        ThreeErrorSpec(0, 1, 0.1, 0.4, 0.5, 2, lambda3=1.0)


def test_three_error_target_centre_always_accepts():
    spec = ThreeErrorSpec(0, 1, 0.1, 0.4, 0.5, 4)
    _, _, v = model_verdicts(spec, 0.5, 100_000)
    assert v.all()


def test_three_error_far_outside_rejects():
    spec = ThreeErrorSpec(0, 1, 0.1, 0.4, 0.5, 4)
    _, _, v = model_verdicts(spec, -1.4, 20_000)
    assert not v.any()


def test_three_error_ring_point_meets_budget_at_sized_n():
    # error at the ring edge is (1 - eps1/2delta)^n / 2; n = 22 gives ~0.049 <= 0.05
    spec = ThreeErrorSpec(0, 1, 0.1, 0.4, 0.5, 22, 0.05, 0.05, 0.05)
    _, _, v = model_verdicts(spec, -0.3, 200_000, seed=5)
    assert 1 - v.mean() <= 0.05


@pytest.mark.parametrize("kappa,want", [(-0.3, 1), (-0.4, 0), (0.0, 1), (-0.2, 1)])
def test_three_error_probability_matches_integration(kappa, want):
    spec = ThreeErrorSpec(0, 0.2, 0.1, 0.4, 0.5, 2)
    p = grid_probability(spec, kappa, 1 - want, 2000)
    assert p == pytest.approx(three_error_error_probability(spec, kappa, want), abs=2e-3)


def test_midrange_tail_against_simulation():
    delta, n = 0.5, 5
    u = uniforms(3, np.arange(400_000), n)
    dev = delta * (1 - u.min(axis=1) - u.max(axis=1))
    for d in (0.0, 0.05, 0.2, 0.45):
        assert (dev > d).mean() == pytest.approx(midrange_tail(d, delta, n), abs=3e-3)
    assert midrange_tail(0.6, delta, n) == 0.0


def test_feasible_interval_covers_kappa_over_a_million_trials():
    kappa, delta = 0.37, 0.5
    u = uniforms(2024, np.arange(200_000), 5)
    lo, hi, ok = feasible_bounds(UniformRootModel(kappa, delta).from_uniforms(0.0, u), delta)
    assert ok.all()
    assert u.size == 10**6
    slack = 4 * np.finfo(float).eps
    assert np.all((lo <= kappa + slack) & (hi >= kappa - slack))


def test_ring_regions_symmetric_and_literal():
    spec = ThreeErrorSpec(0, 1, 0.1, 0.4, 0.5, 4)
    left, right = spec.ring_regions()
    assert (left.lo, left.hi) == pytest.approx((-0.3, -0.1))
    assert (right.lo, right.hi) == pytest.approx((1.1, 1.3))
    _, lit = spec.ring_regions(literal=True)
    assert lit.hi == pytest.approx(1.5)


def test_vectorised_verdicts_match_scalar_runs():
    for spec in (TwoErrorSpec(0, 1, 0.5, 0.5, 3), ThreeErrorSpec(0, 1, 0.1, 0.4, 0.5, 3)):
        for kappa in (-0.6, -0.3, 0.2, 1.3):
            u = uniforms(1, np.arange(300), spec.n)
            obs = UniformRootModel(kappa, spec.delta).from_uniforms(0.0, u)
            lo, hi, _ = feasible_bounds(obs, spec.delta)
            v = verdicts(spec, lo, hi)
            assert [run_test(spec, row).bit for row in obs] == list(v)


dyadic = st.integers(-64, 64).map(lambda k: k / 16)


@settings(max_examples=200)
@given(dyadic, dyadic, st.lists(st.integers(0, 15), min_size=3, max_size=3),
       st.sampled_from(["two", "three"]))
def test_verdict_translation_invariant(kappa, shift, idx, kind):
    # dyadic values keep every shift exact
    delta = 0.5
    if kind == "two":
        spec = TwoErrorSpec(0.0, 1.0, 0.5, delta, 3)
        moved = TwoErrorSpec(shift, 1.0 + shift, 0.5, delta, 3)
    else:
        spec = ThreeErrorSpec(0.0, 1.0, 0.125, 0.5, delta, 3)
        moved = ThreeErrorSpec(shift, 1.0 + shift, 0.125, 0.5, delta, 3)
    obs = np.array([-kappa - delta + i / 16 for i in idx])
    assert run_test(spec, obs).bit == run_test(moved, obs - shift).bit


def test_three_error_verdict_fields():
    spec = ThreeErrorSpec(0, 1, 0.1, 0.4, 0.5, 2)
    v = run_three_error_test(spec, [-0.5, -0.4])
    assert v.bit == 1
    assert v.feasible.lo <= v.feasible.hi
