"""Weak-moment machinery: N_p functionals, weak-Lp norms, tail certificates.

Scale convention, frozen here and relied on by the regression tests: the
functional N_p(X) = sup_t t^p P(||X|| > t) lives on the p-th-power scale,
while the weak norm sup_A P(A)^(1/p - 1) E[||X|| 1_A] is linear in X. The
dimensionally consistent two-sided comparison is therefore

    N_p(X)^(1/p)  <=  ||X||_{p,w}  <=  p/(p-1) * N_p(X)^(1/p),

which is exact on the Pareto family: survival min(1, t^-p0) gives
N_p^(1/p) = 1 for p <= p0 and weak norm p0/(p0-1), meeting the upper bound
with equality at p = p0. ``sandwich_check`` compares on this linear scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from .errors import CapabilityError, InputError
from .golden import golden_min


def _shape(alpha: float) -> float:
    """Stretched-exponential shape c = 2*alpha/(1-alpha)."""
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    return 2.0 * alpha / (1.0 - alpha)


# --------------------------------------------------------------------------
# Tail functions t -> P(||X|| > t)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ParetoTail:
    """Survival min(1, (scale/t)^p): the norm of a Pareto-radius variable."""

    p: float
    scale: float = 1.0

    def __post_init__(self):
        if self.p <= 0 or self.scale <= 0:
            raise InputError("pareto tail needs p > 0 and scale > 0")

    def __call__(self, t: float) -> float:
        if t <= self.scale:
            return 1.0
        return (self.scale / t) ** self.p


@dataclass(frozen=True)
class WeibullTail:
    """Survival exp(-t^c) with c = 2*alpha/(1-alpha)."""

    alpha: float

    def __post_init__(self):
        _shape(self.alpha)

    @property
    def c(self) -> float:
        return _shape(self.alpha)

    def __call__(self, t: float) -> float:
        if t <= 0.0:
            return 1.0
        return math.exp(-(t**self.c))


@dataclass(frozen=True)
class BoundedTail:
    """Survival 1_{t < b}: a variable equal to b almost surely."""

    b: float

    def __post_init__(self):
        if self.b < 0:
            raise InputError("bounded tail needs b >= 0")

    def __call__(self, t: float) -> float:
        return 1.0 if t < self.b else 0.0


class EmpiricalTail:
    """Right-continuous empirical survival function of nonnegative samples."""

    def __init__(self, samples):
        arr = np.sort(np.asarray(samples, dtype=float).ravel())
        if arr.size < 1:
            raise InputError("empirical tail needs at least one sample")
        if arr[0] < 0:
            raise InputError("samples are norms and must be nonnegative")
        arr.flags.writeable = False
        self.samples = arr

    def __call__(self, t: float) -> float:
        m = self.samples.size
        return float(m - np.searchsorted(self.samples, t, side="right")) / m

    def __repr__(self):
        return f"EmpiricalTail(m={self.samples.size})"


TailFunction = Union[ParetoTail, WeibullTail, BoundedTail, EmpiricalTail]

_TAIL_TAGS = {
    ParetoTail: "pareto",
    WeibullTail: "weibull_like",
    BoundedTail: "bounded",
    EmpiricalTail: "empirical",
}


def tail_to_json(tail: TailFunction) -> dict:
    if isinstance(tail, ParetoTail):
        return {"form": "pareto", "p": tail.p, "scale": tail.scale}
    if isinstance(tail, WeibullTail):
        return {"form": "weibull_like", "alpha": tail.alpha}
    if isinstance(tail, BoundedTail):
        return {"form": "bounded", "b": tail.b}
    if isinstance(tail, EmpiricalTail):
        return {"form": "empirical", "samples": tail.samples.tolist()}
    raise InputError(f"not a tail function: {tail!r}")


def tail_from_json(data: dict) -> TailFunction:
    try:
        form = data["form"]
        if form == "pareto":
            return ParetoTail(float(data["p"]), float(data.get("scale", 1.0)))
        if form == "weibull_like":
            return WeibullTail(float(data["alpha"]))
        if form == "bounded":
            return BoundedTail(float(data["b"]))
        if form == "empirical":
            return EmpiricalTail(data["samples"])
    except KeyError as exc:
        raise InputError(f"bad tail spec, missing {exc}") from exc
    raise InputError(f"unknown tail form {form!r}")


def _as_tail(tail_or_samples) -> TailFunction:
    if isinstance(tail_or_samples, (ParetoTail, WeibullTail, BoundedTail, EmpiricalTail)):
        return tail_or_samples
    return EmpiricalTail(tail_or_samples)


# --------------------------------------------------------------------------
# N_p functional: sup_t t^p P(||X|| > t)
# --------------------------------------------------------------------------

def n_p(tail_or_samples, p: float) -> float:
    """Weak p-th moment functional; returns inf when the supremum diverges."""
    if p <= 1.0:
        raise InputError(f"order p must exceed 1, got {p}")
    tail = _as_tail(tail_or_samples)
    if isinstance(tail, ParetoTail):
        if p > tail.p:
            return math.inf
        return tail.scale**p
    if isinstance(tail, WeibullTail):
        ratio = p / tail.c
        return ratio**ratio * math.exp(-ratio)
    if isinstance(tail, BoundedTail):
        return tail.b**p
    s = tail.samples
    m = s.size
    counts = (m - np.arange(m)) / m  # P(X > t) just below each order statistic
    return float(np.max(s**p * counts))


# --------------------------------------------------------------------------
# Weak-Lp norm: sup_A P(A)^(1/p - 1) E[||X|| 1_A]
# --------------------------------------------------------------------------

def _weibull_upper_mean(tail: WeibullTail, t: float) -> float:
    """E[X 1_{X > t}] for the stretched-exponential law, via incomplete gamma."""
    c = tail.c
    integral = special.gammaincc(1.0 / c, t**c) * special.gamma(1.0 / c) / c
    return t * math.exp(-(t**c)) + integral


def weak_lp_norm(tail_or_samples, p: float) -> float:
    """Weak-Lp norm; analytic tails in closed form, samples via top slices.

    For a sample of m points the supremum over events is attained at a
    top-k slice, giving max_k (k/m)^(1/p) * mean(top k); the brute-force
    cross-check over all subsets of small sample sets lives in the tests.
    """
    if p <= 1.0:
        raise InputError(f"order p must exceed 1, got {p}")
    tail = _as_tail(tail_or_samples)
    if isinstance(tail, BoundedTail):
        return tail.b
    if isinstance(tail, ParetoTail):
        if p > tail.p or tail.p <= 1.0:
            return math.inf
        # threshold events give P^(1/p-1) E[X 1] = (p0/(p0-1)) * scale^(p0/p) * t^(1-p0/p),
        # nonincreasing in t for p <= p0, so the supremum sits at t = scale
        return tail.p / (tail.p - 1.0) * tail.scale
    if isinstance(tail, WeibullTail):
        c = tail.c

        def neg_g(t: float) -> float:
            surv = math.exp(-(t**c))
            if surv <= 0.0:
                return 0.0
            return -(surv ** (1.0 / p - 1.0)) * _weibull_upper_mean(tail, t)

        # candidates include the N_p maximizer so the linear-scale lower
        # sandwich bound is certified numerically
        t_star = (p / c) ** (1.0 / c)
        t_hi = max(3.0 * t_star, (80.0) ** (1.0 / c))
        grid = np.linspace(0.0, t_hi, 257)
        vals = [neg_g(float(t)) for t in grid]
        k = int(np.argmin(vals))
        lo = float(grid[max(0, k - 1)])
        hi = float(grid[min(len(grid) - 1, k + 1)])
        _, fmin, _ = golden_min(neg_g, lo, hi, tol=1e-12)
        return max(-fmin, -neg_g(t_star), -neg_g(0.0))
    s = tail.samples
    m = s.size
    desc = s[::-1]
    k = np.arange(1, m + 1)
    means = np.cumsum(desc) / k
    return float(np.max((k / m) ** (1.0 / p) * means))


@dataclass(frozen=True)
class SandwichCheck:
    n_p_root: float
    weak_norm: float
    ok: bool


def sandwich_check(tail_or_samples, p: float, rel_slack: float = 1e-9) -> SandwichCheck:
    """Check N_p^(1/p) <= weak norm <= p/(p-1) * N_p^(1/p) with relative slack.

    ok = False is a reportable finding, not an error; infinite values fail.
    """
    npv = n_p(tail_or_samples, p)
    weak = weak_lp_norm(tail_or_samples, p)
    if math.isinf(npv) or math.isinf(weak):
        return SandwichCheck(npv, weak, False)
    root = npv ** (1.0 / p)
    upper = p / (p - 1.0) * root
    ok = root <= weak * (1.0 + rel_slack) and weak <= upper * (1.0 + rel_slack)
    return SandwichCheck(root, weak, ok)


# --------------------------------------------------------------------------
# Stretched-exponential tail constant: sup_t exp(t^c) P(||X|| > t)
# --------------------------------------------------------------------------

def exp_tail_constant(tail_or_samples, alpha: float) -> float:
    """Smallest constant bounding exp(t^c) * tail(t); inf when the tail is too heavy."""
    c = _shape(alpha)
    tail = _as_tail(tail_or_samples)
    if isinstance(tail, BoundedTail):
        return math.exp(tail.b**c)
    if isinstance(tail, ParetoTail):
        return math.inf  # polynomial decay never beats a stretched exponential
    if isinstance(tail, WeibullTail):
        c0 = tail.c
        if c > c0:
            return math.inf
        if c == c0:
            return 1.0
        t_star = (c / c0) ** (1.0 / (c0 - c))
        return max(1.0, math.exp(t_star**c - t_star**c0))
    s = tail.samples
    m = s.size
    counts = (m - np.arange(m)) / m
    return float(np.max(np.exp(s**c) * counts))


# --------------------------------------------------------------------------
# Truncated-part second-moment inequality, checked by simulation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentCheck:
    lhs: float
    rhs: float
    ok: bool


def centered_second_moment_check(model, u: float, paths: int, seed: int = 0) -> MomentCheck:
    """Monte Carlo check of E||X'' ||^2 <= 4 E[||X||^2 1_{||X|| > u}].

    X'' is the conditionally recentered above-u part of an increment. All
    bundled models have sign-symmetric increments, so the recentering term
    vanishes and X'' = X 1_{||X|| > u}; models without that structure are
    rejected. ok allows 3 standard errors of Monte Carlo slack.
    """
    from . import simulate  # late import: simulate builds on this module

    if u < 0:
        raise InputError("truncation level u must be nonnegative")
    if not model.symmetric_truncation():
        raise CapabilityError(
            f"model {model.variant} has no computable conditional truncation mean"
        )
    inc = simulate.increment_samples(model, paths, seed)
    norms_sq = np.square(simulate.increment_norms(model, inc))
    above = norms_sq * (np.sqrt(norms_sq) > u)
    lhs_terms = above            # ||X 1_{||X||>u}||^2, recentering term is zero
    rhs_terms = 4.0 * above
    diff = rhs_terms - lhs_terms
    se = float(np.std(diff, ddof=1) / math.sqrt(paths)) if paths > 1 else 0.0
    ok = float(np.mean(diff)) >= -3.0 * se
    return MomentCheck(float(np.mean(lhs_terms)), float(np.mean(rhs_terms)), ok)
