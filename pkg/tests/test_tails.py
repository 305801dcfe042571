"""Weak-moment machinery.

Claims covered:
    - N_p closed forms: Pareto saturates at 1, bounded gives b^p, orders
      above the tail index flag infinity, Weibull matches its mode formula
    - weak norm: Pareto gives p0/(p0-1) (sandwich upper bound met at p=p0),
      constants give themselves, the sample estimator equals brute force
      over all subsets of small sample sets
    - sandwich holds on the linear N_p^(1/p) scale for analytic tails and
      for large empirical samples
    - stretched-exponential tail constants: bounded -> e^(b^c), matched
      Weibull -> 1, Pareto -> infinity, mismatched Weibull matches a grid
    - homogeneity degrees under scaling
    - the truncated-part second-moment inequality holds on bundled models
"""

import itertools
import math

import numpy as np
import pytest

from mdev import (
    BoundedTail,
    EmpiricalTail,
    InputError,
    ParetoRadial,
    ParetoTail,
    ProductY0,
    RademacherReal,
    WeibullTail,
    exp_tail_constant,
    n_p,
    sandwich_check,
    weak_lp_norm,
)
from mdev.tails import centered_second_moment_check, tail_from_json, tail_to_json
from mdev import rng


def pareto_samples(m, p=3.0, seed=0):
    u = rng.uniform_block(seed, 0, m, 1)[:, 0]
    return (1.0 - u) ** (-1.0 / p)


# --------------------------------------------------------------------------
# N_p
# --------------------------------------------------------------------------

def test_n_p_pareto():
    assert n_p(ParetoTail(3.0), 3.0) == pytest.approx(1.0, rel=1e-14)
    assert n_p(ParetoTail(3.0), 2.0) == pytest.approx(1.0, rel=1e-14)
    assert n_p(ParetoTail(3.0), 4.0) == math.inf
    assert n_p(ParetoTail(3.0, scale=2.0), 3.0) == pytest.approx(8.0, rel=1e-14)


def test_n_p_bounded_and_weibull():
    assert n_p(BoundedTail(1.0), 2.0) == pytest.approx(1.0)
    assert n_p(BoundedTail(2.0), 3.0) == pytest.approx(8.0)
    tail = WeibullTail(0.5)  # shape c = 2
    p = 3.0
    # grid cross-check of sup t^p exp(-t^c)
    ts = np.linspace(1e-6, 20.0, 400001)
    grid = float(np.max(ts**p * np.exp(-(ts**tail.c))))
    assert n_p(tail, p) == pytest.approx(grid, rel=1e-6)
    assert n_p(tail, p) >= grid  # closed form is the true supremum


def test_n_p_empirical_matches_definition():
    s = pareto_samples(2000, seed=4)
    tail = EmpiricalTail(s)
    p = 2.5
    ts = np.unique(s)
    brute = max(
        float(t**p) * tail(float(t) - 1e-12) for t in ts
    )  # just below each jump
    assert n_p(tail, p) == pytest.approx(brute, rel=1e-10)


def test_n_p_rejects_small_p():
    with pytest.raises(InputError):
        n_p(ParetoTail(3.0), 1.0)


# --------------------------------------------------------------------------
# Weak norm
# --------------------------------------------------------------------------

def test_weak_norm_pareto_saturates_upper_bound():
    # E[X 1_{X>t}] = (3/2) t^-2 and P^(1/3 - 1) = t^2: constant 3/2 = p/(p-1)
    assert weak_lp_norm(ParetoTail(3.0), 3.0) == pytest.approx(1.5, rel=1e-14)
    assert weak_lp_norm(ParetoTail(3.0), 2.0) == pytest.approx(1.5, rel=1e-14)
    assert weak_lp_norm(ParetoTail(3.0), 4.0) == math.inf


def test_weak_norm_constant():
    assert weak_lp_norm(BoundedTail(2.5), 3.0) == pytest.approx(2.5)


def test_weak_norm_unit_samples():
    samples = np.ones(64)
    assert weak_lp_norm(samples, 2.0) == pytest.approx(1.0, rel=1e-14)


def test_weak_norm_matches_bruteforce_subsets():
    """Top-slice estimator equals the supremum over all events of 5 atoms."""
    samples = [0.3, 1.0, 2.5, 0.7, 1.2]
    m = len(samples)
    for p in (1.5, 2.0, 3.0):
        brute = 0.0
        for k in range(1, m + 1):
            for subset in itertools.combinations(samples, k):
                val = (k / m) ** (1.0 / p - 1.0) * sum(subset) / m
                brute = max(brute, val)
        assert weak_lp_norm(samples, p) == pytest.approx(brute, rel=1e-12)


def test_weak_norm_weibull_between_sandwich_bounds():
    tail = WeibullTail(0.5)
    for p in (2.0, 3.0):
        root = n_p(tail, p) ** (1.0 / p)
        weak = weak_lp_norm(tail, p)
        assert root <= weak * (1 + 1e-9)
        assert weak <= p / (p - 1.0) * root * (1 + 1e-9)


def test_weak_norm_weibull_matches_quadrature_oracle():
    """Independent route: sup over a t-grid of P^(1/p-1) * quad(E[X 1_{X>t}])."""
    from scipy.integrate import quad

    for alpha, p in ((0.5, 2.5), (0.4, 3.0)):
        tail = WeibullTail(alpha)
        c = tail.c

        def upper_mean(t):
            val, _ = quad(lambda s: s * c * s ** (c - 1.0) * math.exp(-(s**c)),
                          t, np.inf, epsabs=1e-13, epsrel=1e-12)
            return val

        grid = np.linspace(0.0, 6.0 ** (1.0 / c) * 3.0, 600)
        brute = max(
            math.exp(-(t**c)) ** (1.0 / p - 1.0) * upper_mean(float(t))
            for t in grid
            if math.exp(-(t**c)) > 1e-12
        )
        weak = weak_lp_norm(tail, p)
        assert weak == pytest.approx(brute, rel=1e-6)
        assert weak >= brute * (1 - 1e-9)  # ours is a sup over a superset


# --------------------------------------------------------------------------
# Sandwich
# --------------------------------------------------------------------------

def test_sandwich_pareto_analytic():
    check = sandwich_check(ParetoTail(3.0), 3.0)
    assert check.n_p_root == pytest.approx(1.0, rel=1e-12)
    assert check.weak_norm == pytest.approx(1.5, rel=1e-12)
    assert check.ok


def test_sandwich_constant():
    for p in (2.0, 3.5):
        check = sandwich_check(BoundedTail(2.0), p)
        assert check.n_p_root == pytest.approx(2.0, rel=1e-12)
        assert check.weak_norm == pytest.approx(2.0, rel=1e-12)
        assert check.ok


def test_sandwich_empirical_pareto():
    s = pareto_samples(100000, seed=77)
    for p in (2.5, 3.0, 4.0):
        assert sandwich_check(s, p).ok


def test_sandwich_infinite_is_reported_not_raised():
    check = sandwich_check(ParetoTail(3.0), 4.0)
    assert not check.ok


# --------------------------------------------------------------------------
# Exponential tail constant
# --------------------------------------------------------------------------

def test_exp_tail_constant_bounded():
    for alpha in (0.3, 0.5, 0.7):
        assert exp_tail_constant(BoundedTail(1.0), alpha) == pytest.approx(math.e, rel=1e-14)
    # exactly exp(b^c)
    alpha = 0.5
    assert exp_tail_constant(BoundedTail(2.0), alpha) == pytest.approx(
        math.exp(2.0**2), rel=1e-14
    )


def test_exp_tail_constant_matched_weibull_is_one():
    for alpha in (0.3, 0.5, 0.7):
        assert exp_tail_constant(WeibullTail(alpha), alpha) == 1.0


def test_exp_tail_constant_pareto_diverges():
    assert exp_tail_constant(ParetoTail(3.0), 0.5) == math.inf


def test_exp_tail_constant_mismatched_weibull():
    # lighter tail than the probe: finite, matches a grid maximization
    tail = WeibullTail(0.7)  # c0 = 14/3
    alpha = 0.5  # c = 2
    val = exp_tail_constant(tail, alpha)
    ts = np.linspace(0.0, 5.0, 200001)
    grid = float(np.max(np.exp(ts**2.0 - ts**tail.c)))
    assert val == pytest.approx(grid, rel=1e-8)
    # heavier tail than the probe: diverges
    assert exp_tail_constant(WeibullTail(0.3), 0.5) == math.inf


def test_exp_tail_constant_empirical():
    s = np.array([0.5, 1.0, 1.5])
    alpha = 0.5  # c = 2
    want = max(
        math.exp(0.5**2) * 1.0, math.exp(1.0**2) * 2 / 3, math.exp(1.5**2) * 1 / 3
    )
    assert exp_tail_constant(s, alpha) == pytest.approx(want, rel=1e-12)


# --------------------------------------------------------------------------
# Homogeneity
# --------------------------------------------------------------------------

@pytest.mark.parametrize("lam", [0.5, 2.0, 7.5])
def test_scaling_degrees(lam):
    p = 2.5
    base, scaled = ParetoTail(4.0, 1.0), ParetoTail(4.0, lam)
    assert n_p(scaled, p) == pytest.approx(lam**p * n_p(base, p), rel=1e-12)
    assert weak_lp_norm(scaled, p) == pytest.approx(lam * weak_lp_norm(base, p), rel=1e-12)
    s = pareto_samples(500, p=4.0, seed=3)
    assert n_p(lam * s, p) == pytest.approx(lam**p * n_p(s, p), rel=1e-12)
    assert weak_lp_norm(lam * s, p) == pytest.approx(lam * weak_lp_norm(s, p), rel=1e-12)


# --------------------------------------------------------------------------
# Truncated-part second moment
# --------------------------------------------------------------------------

def test_centered_second_moment_rademacher():
    # u >= 1 removes everything; u < 1 keeps the whole variable
    check = centered_second_moment_check(RademacherReal(), 1.5, 1000, seed=0)
    assert check.lhs == 0.0 and check.ok
    check = centered_second_moment_check(RademacherReal(), 0.5, 1000, seed=0)
    assert check.lhs == pytest.approx(1.0) and check.rhs == pytest.approx(4.0)
    assert check.ok


def test_centered_second_moment_product_y0():
    check = centered_second_moment_check(ProductY0(alpha=0.5), 2.0, 100000, seed=9)
    assert check.ok
    assert check.lhs <= check.rhs


def test_centered_second_moment_pareto_radial():
    check = centered_second_moment_check(ParetoRadial(p=3.0), 1.5, 50000, seed=5)
    assert check.ok


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

def test_tail_json_round_trip():
    for tail in (ParetoTail(3.0, 2.0), WeibullTail(0.4), BoundedTail(1.5)):
        assert tail_from_json(tail_to_json(tail)) == tail
    emp = EmpiricalTail([1.0, 2.0])
    again = tail_from_json(tail_to_json(emp))
    assert np.array_equal(again.samples, emp.samples)
    with pytest.raises(InputError):
        tail_from_json({"form": "nope"})
