"""Trade-off relations, error bounds, and action-space construction."""

import math

import numpy as np
import pytest

from entpack.actions import (
    Action,
    ActionSpace,
    approximation_error_bound,
    build_action_space,
    exact_batched_probability,
    max_success_probability,
    singleclick_fidelity,
    synthetic_action_space,
)
from entpack.model import ModelParams, ttl_of_fidelity


def test_singleclick_fidelity_values():
    assert singleclick_fidelity(1e-12, 2.0) == pytest.approx(1.0, abs=1e-10)
    assert singleclick_fidelity(0.1, 1.0) == pytest.approx(1.0 + math.log(0.9))


def test_singleclick_fidelity_rejects_boundary():
    # at the supremum the fidelity would hit the usability threshold exactly
    sup = max_success_probability(2.0, 0.5)
    with pytest.raises(ValueError):
        singleclick_fidelity(sup, 2.0)
    with pytest.raises(ValueError):
        singleclick_fidelity(0.0, 2.0)


def test_max_success_probability_values():
    assert max_success_probability(2.0, 0.5) == pytest.approx(1.0 - math.exp(-0.25))
    assert max_success_probability(1.0, 0.5) == pytest.approx(1.0 - math.exp(-0.5))
    assert max_success_probability(1e9, 0.5) == pytest.approx(0.0, abs=1e-8)


def test_exact_batched_probability():
    assert exact_batched_probability(1.0, 2.0, 500) == 0.0
    assert exact_batched_probability(0.9, 2.0, 1) == pytest.approx(0.05)


def test_exact_batched_rejects_bad_per_execution():
    with pytest.raises(ValueError):
        exact_batched_probability(0.1, 0.5, 1)  # per-execution prob 1.8
    with pytest.raises(ValueError):
        exact_batched_probability(0.9, 2.0, 0)


def test_exact_exceeds_approximation_within_bound():
    for m_batch in (500, 1000):
        for f in np.linspace(0.51, 0.999, 200):
            exact = exact_batched_probability(f, 2.0, m_batch)
            approx = -math.expm1(-(1.0 - f) / 2.0)
            gap = exact - approx
            assert gap >= 0.0
            assert gap <= approximation_error_bound(f, 2.0, m_batch)


def test_gap_size_example():
    exact = exact_batched_probability(0.9, 2.0, 500)
    approx = -math.expm1(-0.05)
    assert 0.0 <= exact - approx < 1.3e-4
    assert approximation_error_bound(0.9, 2.0, 500) == pytest.approx(5.0e-6, rel=0.01)
    assert approximation_error_bound(0.5, 1.0, 1000) == pytest.approx(2.5e-4, rel=0.01)


def test_bound_vanishes_at_perfect_fidelity():
    assert approximation_error_bound(1.0, 2.0, 500) == 0.0


def test_bound_rejects_tiny_batches():
    with pytest.raises(ValueError):
        approximation_error_bound(0.5, 1e-3, 1)  # y <= 1


def test_sandwich_inequality():
    for y in np.logspace(math.log10(1.0 + 1e-6), 6.0, 400):
        lower = (1.0 - 1.0 / y) ** (y - 1.0)
        upper = (1.0 - 1.0 / y) ** y
        assert lower > 1.0 / math.e > upper


@pytest.mark.parametrize(
    "gamma,lam,expected_ttls",
    [(0.19, 2.0, tuple(range(1, 7))), (0.10, 1.0, tuple(range(1, 12)))],
)
def test_build_action_space_regimes(gamma, lam, expected_ttls):
    params = ModelParams(gamma=gamma, f_app=0.5, n=2, lam=lam)
    space = build_action_space(params)
    assert space.ttl_values == expected_ttls
    assert space.provenance == "single-click"
    for action in space.actions:
        assert ttl_of_fidelity(action.fidelity, gamma, 0.5) == action.ttl
        assert 0.0 < action.p < max_success_probability(lam, 0.5)
    ps = space.p_values
    assert all(a > b for a, b in zip(ps, ps[1:]))
    fs = [a.fidelity for a in space.actions]
    assert all(a < b for a, b in zip(fs, fs[1:]))


def test_build_action_space_respects_probability_cap():
    unrestricted = build_action_space(ModelParams(gamma=0.19, f_app=0.5, n=2, lam=2.0))
    q = unrestricted.actions[2].p  # cap below the lifetime-1 and -2 maxima
    capped = build_action_space(ModelParams(gamma=0.19, f_app=0.5, n=2, lam=2.0, q=q))
    assert capped.t_min == 3
    assert capped.actions[0].p == pytest.approx(q)
    assert all(a.p <= q + 1e-15 for a in capped.actions)


def test_synthetic_space_accepted_verbatim():
    space = synthetic_action_space([(0.2, 6), (0.5, 3)])
    assert space.ttl_values == (3, 6)
    assert space.p_values == (0.5, 0.2)
    assert space.provenance == "synthetic"


def test_action_space_invariants_enforced():
    with pytest.raises(ValueError):
        synthetic_action_space([(0.5, 3), (0.6, 6)])  # p must decrease
    with pytest.raises(ValueError):
        synthetic_action_space([(0.5, 3), (0.2, 3)])  # ttl must increase
    with pytest.raises(ValueError):
        ActionSpace(actions=())
    with pytest.raises(ValueError):
        Action(p=0.0, ttl=3)
    with pytest.raises(ValueError):
        Action(p=0.5, ttl=0)


def test_first_with_ttl_at_least(syn2):
    assert syn2.first_with_ttl_at_least(1) == 0
    assert syn2.first_with_ttl_at_least(3) == 0
    assert syn2.first_with_ttl_at_least(4) == 1
    with pytest.raises(ValueError):
        syn2.first_with_ttl_at_least(7)


def test_build_action_space_high_decay_rate():
    # at rates above ~1 the first band-entry step can be snapped back to the
    # band edge; the construction widens the step until the lifetime verifies
    params = ModelParams(gamma=1.05, f_app=0.3, n=2, lam=1.0)
    space = build_action_space(params)
    assert space.ttl_values == (1, 2, 3)
    for action in space.actions:
        assert ttl_of_fidelity(action.fidelity, 1.05, 0.3) == action.ttl


def test_tiny_cap_leaves_only_longest_lifetime():
    # q below every lifetime band's maximum: only the longest lifetime
    # remains, generated at the cap itself
    params = ModelParams(gamma=0.19, f_app=0.5, n=2, lam=2.0, q=1e-12)
    space = build_action_space(params)
    assert space.ttl_values == (6,)
    assert space.actions[0].p == pytest.approx(1e-12)
