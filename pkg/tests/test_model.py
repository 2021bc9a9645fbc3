"""Decay map, lifetime conversion, and parameter validation."""

import math
import random

import pytest

from entpack.model import (
    InfeasibleError,
    ModelParams,
    fidelity_after,
    max_ttl,
    ttl_of_fidelity,
)


def test_zero_steps_is_identity():
    assert fidelity_after(0.8, 0, 0.19) == 0.8


def test_long_time_fixed_point():
    assert abs(fidelity_after(0.26, 1000, 0.19) - 0.25) < 1e-12


def test_six_steps_from_perfect_fidelity_crosses_half():
    value = fidelity_after(1.0, 6, 0.19)
    assert abs(value - (0.25 + 0.75 * math.exp(-1.14))) < 1e-12
    assert value < 0.5


def test_strictly_decreasing_in_time():
    prev = 1.0
    for t in range(1, 10):
        cur = fidelity_after(1.0, t, 0.3)
        assert cur < prev
        prev = cur


@pytest.mark.parametrize(
    "f,gamma,f_app,expected",
    [
        (1.0, 0.19, 0.5, 6),
        (1.0, 0.10, 0.5, 11),
        (0.5 + 1e-9, 0.19, 0.5, 1),
        (0.5 + 1e-9, 2.5, 0.5, 1),
    ],
)
def test_ttl_values(f, gamma, f_app, expected):
    assert ttl_of_fidelity(f, gamma, f_app) == expected


def test_max_ttl_regimes():
    assert max_ttl(0.19, 0.5) == 6
    assert max_ttl(0.10, 0.5) == 11


def test_max_ttl_exact_integer_decay_time():
    # raw decay time is exactly 1; the snap keeps it from rounding to 2
    assert max_ttl(math.log(3.0), 0.5) == 1


def test_round_trip_raw_integer_lifetimes():
    rng = random.Random(7)
    for _ in range(200):
        gamma = rng.uniform(0.05, 1.5)
        f_app = rng.uniform(0.3, 0.9)
        t_cap = int(math.log(0.75 / (f_app - 0.25)) / gamma)
        for t in range(1, min(t_cap, 12) + 1):
            f = 0.25 + (f_app - 0.25) * math.exp(gamma * t)
            assert abs(fidelity_after(f, t, gamma) - f_app) < 1e-12
            assert ttl_of_fidelity(f, gamma, f_app) == t


def test_threshold_straddles_usability():
    rng = random.Random(11)
    for _ in range(300):
        gamma = rng.uniform(0.05, 1.0)
        f_app = rng.uniform(0.3, 0.9)
        f = rng.uniform(f_app + 1e-6, 1.0)
        ttl = ttl_of_fidelity(f, gamma, f_app)
        assert fidelity_after(f, ttl, gamma) <= f_app + 1e-9
        if ttl >= 2:
            assert fidelity_after(f, ttl - 1, gamma) > f_app


def test_ttl_monotone_in_fidelity_and_rate():
    rng = random.Random(13)
    for _ in range(300):
        gamma = rng.uniform(0.05, 1.0)
        f_app = rng.uniform(0.3, 0.8)
        f1 = rng.uniform(f_app + 1e-6, 1.0)
        f2 = rng.uniform(f_app + 1e-6, 1.0)
        lo, hi = sorted((f1, f2))
        assert ttl_of_fidelity(lo, gamma, f_app) <= ttl_of_fidelity(hi, gamma, f_app)
        g2 = gamma * rng.uniform(1.0, 3.0)
        assert ttl_of_fidelity(hi, g2, f_app) <= ttl_of_fidelity(hi, gamma, f_app)


@pytest.mark.parametrize("bad", [0.25, 0.2, 1.0001, -1.0])
def test_fidelity_domain_errors(bad):
    with pytest.raises(ValueError):
        fidelity_after(bad, 1, 0.19)


def test_rate_and_time_domain_errors():
    with pytest.raises(ValueError):
        fidelity_after(0.8, 1, 0.0)
    with pytest.raises(ValueError):
        fidelity_after(0.8, -1, 0.19)


def test_ttl_rejects_unusable_fidelity():
    with pytest.raises(ValueError):
        ttl_of_fidelity(0.5, 0.19, 0.5)
    with pytest.raises(ValueError):
        ttl_of_fidelity(0.49, 0.19, 0.5)


def test_params_validation():
    good = ModelParams(gamma=0.19, f_app=0.5, n=5, lam=2.0)
    assert good.t_max == 6
    assert abs(good.q_max - (1.0 - math.exp(-0.25))) < 1e-15
    with pytest.raises(ValueError):
        ModelParams(gamma=-0.1, f_app=0.5, n=2, lam=2.0)
    with pytest.raises(ValueError):
        ModelParams(gamma=0.19, f_app=0.2, n=2, lam=2.0)
    with pytest.raises(ValueError):
        ModelParams(gamma=0.19, f_app=0.5, n=1, lam=2.0)
    with pytest.raises(ValueError):
        ModelParams(gamma=0.19, f_app=0.5, n=2, lam=0.0)
    with pytest.raises(ValueError):
        ModelParams(gamma=0.19, f_app=0.5, n=2, lam=2.0, q=0.5)  # above supremum


def test_params_feasibility():
    with pytest.raises(InfeasibleError):
        ModelParams(gamma=0.19, f_app=0.5, n=7, lam=2.0)  # t_max is 6
    ModelParams(gamma=0.19, f_app=0.5, n=6, lam=2.0)
