"""Closed-form deviation bounds for martingales in smooth Banach spaces.

Every operation returns the bound exactly as the formula gives it: values
above 1 are valid but uninformative and come back flagged ``trivial``,
never clamped, so that domination comparisons between routes stay exact.

Threshold conventions, stated at every signature: theorem-level bounds
control P(max_k ||S_k|| > n*x) and take the normalized level x; the
proof-level operations (``pretrunc_bound``, ``pinelis_hoeffding``,
``i1_i2_numeric``) control P(max_k ||S_k|| > X) at an absolute level X.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

from scipy import integrate

from .errors import InputError, NumericError, UnsupportedSpaceError
from .spaces import SpaceSpec

_E2 = math.exp(2.0)

# Prefactor of the maximal second-moment inequality for (2,D)-smooth-space
# martingales, taken as given from the classical literature.
TAIL_SECOND_MOMENT_CONSTANT = 7200.0

# Rounded-up value of 86400 / (1 - 1/sqrt(2))^2 used by the n-free form of
# the exponential bound's constant.
EXP_CONSTANT = 1007156.0


# --------------------------------------------------------------------------
# Certificates and results
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpCertificate:
    """Stretched-exponential tail hypothesis: sup_i sup_t exp(t^c) P(||X_i||>t) <= C1."""

    alpha: float
    C1: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.C1 < 0:
            raise InputError(f"C1 must be nonnegative, got {self.C1}")


@dataclass(frozen=True)
class PolyCertificate:
    """Polynomial tail hypothesis on increments (p1, C1) and conditional moments (p2, C2)."""

    p1: float
    p2: float
    C1: float
    C2: float

    def __post_init__(self):
        if self.p1 <= 1.0:
            raise InputError(f"p1 must exceed 1, got {self.p1}")
        if self.p2 < self.p1:
            raise InputError(f"need p2 >= p1, got p1={self.p1}, p2={self.p2}")
        if self.C1 < 0 or self.C2 < 0:
            raise InputError("tail constants must be nonnegative")


@dataclass(frozen=True)
class BoundResult:
    value: float
    constants: dict = field(default_factory=dict)
    trivial: bool = False

    @staticmethod
    def make(value: float, constants: dict | None = None) -> "BoundResult":
        if value < 0:
            raise NumericError(f"bound evaluated to a negative value {value}")
        if not math.isfinite(value):
            raise NumericError(f"bound overflowed the float range ({value})")
        return BoundResult(value, dict(constants or {}), value >= 1.0)

    def to_json_dict(self) -> dict:
        return {"value": self.value, "trivial": self.trivial, "constants": dict(self.constants)}


def _check_positive(**kwargs):
    for name, val in kwargs.items():
        if not val > 0:
            raise InputError(f"{name} must be positive, got {val}")


def _check_n(n: int):
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")


def _require_two_smooth(space: SpaceSpec):
    if space.r != 2.0:
        raise UnsupportedSpaceError(
            f"this bound needs a (2, D)-smooth space, got smoothness order r={space.r}"
        )


# --------------------------------------------------------------------------
# Exponential-tail route
# --------------------------------------------------------------------------

def beta_threshold(alpha: float) -> float:
    """Mode (3(1-a)/(2a))^((1-a)/(2a)) of t^3 exp(-t^c), splitting the tail integral."""
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    base = 3.0 * (1.0 - alpha) / (2.0 * alpha)
    return base ** ((1.0 - alpha) / (2.0 * alpha))


def theorem1_constant(alpha: float, x: float, D: float, C1: float) -> float:
    """n-free constant of the exponential bound at normalized level x."""
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    _check_positive(x=x, D=D)
    if C1 < 0:
        raise InputError(f"C1 must be nonnegative, got {C1}")
    inner = x ** (-2.0 * alpha) * 16.0 ** (alpha - 1.0) * D ** (2.0 * (alpha - 1.0))
    inner += x**-2.0 * (3.0 * (1.0 - alpha) / (2.0 * alpha)) ** ((1.0 - alpha) / alpha)
    return 2.0 + EXP_CONSTANT * _E2 * D**2 * C1 * inner


def theorem1_bound(n: int, x: float, space: SpaceSpec, cert: ExpCertificate) -> BoundResult:
    """Exponential deviation bound: C(alpha, x) * exp(-(x/4D)^(2a) n^a).

    Controls P(max_k ||S_k|| > n*x) for martingale differences in a
    (2, D)-smooth space whose increments carry the certificate.
    """
    _check_n(n)
    _check_positive(x=x)
    _require_two_smooth(space)
    c = theorem1_constant(cert.alpha, x, space.D, cert.C1)
    exponent = (x / (4.0 * space.D)) ** (2.0 * cert.alpha) * n**cert.alpha
    return BoundResult.make(
        c * math.exp(-exponent),
        {"C_alpha_x": c, "beta": beta_threshold(cert.alpha), "exponent": exponent},
    )


def pretrunc_bound(
    total_x: float,
    n: int,
    t: float,
    u: float,
    space: SpaceSpec,
    cert: ExpCertificate,
) -> BoundResult:
    """Two-term truncation bound before any choice of the split (t, u).

    Controls P(max_k ||S_k|| > total_x) at the absolute level total_x for
    every t in (0,1) and u > 0: a bounded-part maximal term plus a
    recentered tail-part second-moment term. The theorem-level form
    substitutes total_x = n*x, t = 1/sqrt(2), u = (x/(4 D sqrt(n)))^(1-a).
    """
    _check_n(n)
    _check_positive(total_x=total_x, u=u)
    if not 0.0 < t < 1.0:
        raise InputError(f"t must lie in (0, 1), got {t}")
    _require_two_smooth(space)
    alpha, C1, D = cert.alpha, cert.C1, space.D
    b = beta_threshold(alpha)
    term_bounded = 2.0 * math.exp(-(total_x**2) * t**2 / (8.0 * D**2 * u**2 * n))
    shape = 2.0 * alpha / (1.0 - alpha)
    term_tail = (
        12.0
        * TAIL_SECOND_MOMENT_CONSTANT
        * _E2
        * D**2
        * C1
        * n
        / ((1.0 - t) ** 2 * total_x**2)
        * (u**2 + b**2)
        * math.exp(-(u**shape))
    )
    return BoundResult.make(
        term_bounded + term_tail,
        {"term_bounded": term_bounded, "term_tail": term_tail, "beta": b},
    )


def fan_real_bound(n: int, x: float, alpha: float, C1: float) -> BoundResult:
    """Real-valued comparison bound with the small moment-based constant.

    Hypothesis is the exponential moment sup_i E exp{|X_i|^c} <= C1 (strictly
    stronger than the weak tail condition of ``theorem1_bound``).
    """
    _check_n(n)
    _check_positive(x=x)
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    if C1 < 0:
        raise InputError(f"C1 must be nonnegative, got {C1}")
    inner = x ** (-2.0 * alpha) * 16.0 ** (alpha - 1.0)
    inner += x**-2.0 * (3.0 * (1.0 - alpha) / (2.0 * alpha)) ** ((1.0 - alpha) / alpha)
    c = 2.0 + 35.0 * C1 * inner
    exponent = (x / 4.0) ** (2.0 * alpha) * n**alpha
    return BoundResult.make(c * math.exp(-exponent), {"C_alpha_x": c, "exponent": exponent})


def pinelis_hoeffding(n: int, x_abs: float, b: float, D: float) -> float:
    """Single-coefficient maximal Hoeffding form exp(-x^2 / (2 D^2 n b^2)).

    Evaluated exactly as printed in the source lemma for ||X_i|| <= b at the
    absolute level x_abs. As a bound on P(max_k ||S_k|| >= x_abs) this form
    is falsifiable: one +-1 step already gives P(|S_1| >= 1) = 1 > e^(-1/2),
    so the two-sided event needs the classical leading factor 2 (see
    ``maximal_hoeffding``). Verification campaigns carry both and flag the
    gap; the exponential-route bounds are unaffected, their leading 2 is
    already in place.
    """
    _check_n(n)
    _check_positive(b=b, D=D)
    if x_abs < 0:
        raise InputError(f"x_abs must be nonnegative, got {x_abs}")
    return math.exp(-(x_abs**2) / (2.0 * D**2 * n * b**2))


def maximal_hoeffding(n: int, x_abs: float, b: float, D: float) -> float:
    """Classical maximal Hoeffding bound 2 exp(-x^2 / (2 D^2 n b^2)).

    Controls P(max_k ||S_k|| >= x_abs) for ||X_i|| <= b in a (2, D)-smooth
    space; the factor 2 makes the bound trivial (>= 1) below x ~ D b sqrt(n).
    """
    return 2.0 * pinelis_hoeffding(n, x_abs, b, D)


# --------------------------------------------------------------------------
# Polynomial-tail route
# --------------------------------------------------------------------------

def _check_poly_orders(p1: float, p2: float, r: float):
    if not 1.0 < r <= 2.0:
        raise InputError(f"smoothness order r must lie in (1, 2], got {r}")
    if not p1 > r:
        raise InputError(f"need p1 > r, got p1={p1}, r={r}")
    if p2 < p1:
        raise InputError(f"need p2 >= p1, got p1={p1}, p2={p2}")


def theorem2_constants(p1: float, p2: float, r: float, D: float) -> tuple[float, float]:
    """The two n- and x-free constants of the polynomial deviation bound."""
    _check_poly_orders(p1, p2, r)
    _check_positive(D=D)
    pref = 2.0 ** (2.0 * p2) / (2.0 ** (2.0 * p2) - 1.0) * 2.0 ** (1.0 - r)
    k1 = pref * 2.0 ** (p1 + 2.0 * p1 * p2 / r) * D ** (p1 / r)
    k2 = (
        pref
        * 2.0 ** (p2 + 2.0 * p2**2 / r)
        * D ** (p2 / r)
        * (p2 / (p2 - r)) ** (p2 / r)
    )
    return k1, k2


def theorem2_bound(n: int, x: float, space: SpaceSpec, cert: PolyCertificate) -> BoundResult:
    """Polynomial deviation bound K1 C1 x^-p1 n^(1-p1) + K2 C2 x^-p2 n^(p2/r - p2).

    Controls P(max_k ||S_k|| > n*x) in an (r, D)-smooth space.
    """
    _check_n(n)
    _check_positive(x=x)
    k1, k2 = theorem2_constants(cert.p1, cert.p2, space.r, space.D)
    term1 = k1 * cert.C1 * x**-cert.p1 * float(n) ** (1.0 - cert.p1)
    term2 = k2 * cert.C2 * x**-cert.p2 * float(n) ** (cert.p2 / space.r - cert.p2)
    return BoundResult.make(
        term1 + term2,
        {"K1": k1, "K2": k2, "term_increment": term1, "term_conditional": term2},
    )


def corollary_bound(
    n: int, x: float, space: SpaceSpec, p: float, C: float, sup_moment: float
) -> BoundResult:
    """Deviation bound for independent centered sequences with matched decay.

    Both summands decay like n^(1-p) after the substitution
    p2 = (p-1) r / (r-1); ``sup_moment`` is sup_i (E||X_i||^r)^(p/r),
    supplied by the caller (analytic for the bundled models).
    """
    _check_n(n)
    _check_positive(x=x)
    if p <= space.r:
        raise InputError(f"need p > r, got p={p}, r={space.r}")
    if C < 0 or sup_moment < 0:
        raise InputError("tail constant and moment must be nonnegative")
    r, D = space.r, space.D
    p2 = (p - 1.0) * r / (r - 1.0)
    pref = 2.0 ** (2.0 * p2) / (2.0 ** (2.0 * p2) - 1.0) * 2.0 ** (1.0 - r)
    k = pref * 2.0 ** (p + 2.0 * p * p2 / r) * D ** (p / r)
    value = k * (C * x**-p + sup_moment * x ** (-(p - 1.0) * r / (r - 1.0))) * float(n) ** (
        1.0 - p
    )
    return BoundResult.make(value, {"K": k, "p2": p2})


def lesigne_volny_bound(n: int, x: float, p: float, M: float) -> BoundResult:
    """Real-valued moment bound (18 p sqrt(p/(p-1)))^p M^p x^-p n^(-p/2).

    M^p plays the role of sup_i E|X_i|^p; the classical statement names the
    supremum C1 but displays the bound through M, so M is the parameter here.
    """
    _check_n(n)
    _check_positive(x=x)
    if p < 2.0:
        raise InputError(f"need p >= 2, got {p}")
    if M < 0:
        raise InputError(f"M must be nonnegative, got {M}")
    pref = (18.0 * p * math.sqrt(p / (p - 1.0))) ** p
    return BoundResult.make(pref * M**p * x**-p * float(n) ** (-p / 2.0), {"prefactor": pref})


# --------------------------------------------------------------------------
# Integral route: the two-term bound with a free integration order q
# --------------------------------------------------------------------------

def i1_i2_numeric(
    q: float,
    x_abs: float,
    incr_tail: Callable[[float], float],
    cond_tail: Callable[[float], float],
    r: float,
    D: float,
    rel_tol: float = 1e-8,
) -> tuple[float, float]:
    """Adaptive quadrature of the two tail integrals at absolute level x_abs.

    I1 integrates the increment-maximum tail, I2 the conditional-moment
    tail, both against u^(q-1) on (0,1) with the 2^(-1-q/r) D^(-1/r) x_abs
    scaling. Tail callables must be nonincreasing with values in [0, 1].
    """
    _check_positive(q=q, x_abs=x_abs, D=D)
    if not 1.0 < r <= 2.0:
        raise InputError(f"smoothness order r must lie in (1, 2], got {r}")
    coef = 2.0 ** (q - r) * q / (2.0**q - 1.0)
    scale = 2.0 ** (-1.0 - q / r) * D ** (-1.0 / r) * x_abs

    def one(tail: Callable[[float], float]) -> float:
        def integrand(u: float) -> float:
            return tail(scale * u) * u ** (q - 1.0)

        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, abserr = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-15,
                                             epsrel=rel_tol, limit=400)
            except integrate.IntegrationWarning as exc:
                raise NumericError(f"quadrature did not converge: {exc}") from exc
        floor = max(abs(val), 1e-290)
        if abserr > rel_tol * floor * 10.0:
            raise NumericError(
                f"quadrature achieved {abserr / floor:.3e} relative, wanted {rel_tol:.1e}",
                achieved=abserr / floor,
            )
        return coef * val

    return one(incr_tail), one(cond_tail)


def theorem2_plugin_tails(
    n: int, cert: PolyCertificate, r: float
) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """The polynomial tails the two integrals are evaluated with in the proof route.

    The increment tail is min(1, C1 y^-p1); the conditional tail carries the
    weak-norm chaining factor (p2/(p2-r))^(p2/r) and the n^(p2/r) from
    summing n conditional moments.
    """
    _check_n(n)
    _check_poly_orders(cert.p1, cert.p2, r)
    chain = (cert.p2 / (cert.p2 - r)) ** (cert.p2 / r) * float(n) ** (cert.p2 / r)

    def incr_tail(y: float) -> float:
        if y <= 0.0:
            return 1.0
        return min(1.0, cert.C1 * y**-cert.p1)

    def cond_tail(y: float) -> float:
        if y <= 0.0:
            return 1.0
        return min(1.0, cert.C2 * chain * y**-cert.p2)

    return incr_tail, cond_tail


def theorem2_general_q_bound(
    q: float, n: int, x: float, space: SpaceSpec, cert: PolyCertificate
) -> BoundResult:
    """Polynomial bound with the integration order q left free.

    Closed form of the two integrals with exact 1/(q - p_i) factors instead
    of the rounding used at the fixed q = 2 p2; needs q > p2 for the second
    integral to converge. At q = 2 p2 this is never above ``theorem2_bound``.
    """
    _check_n(n)
    _check_positive(x=x)
    r, D = space.r, space.D
    _check_poly_orders(cert.p1, cert.p2, r)
    if q <= cert.p2:
        raise InputError(f"need q > p2 for a convergent integral, got q={q}, p2={cert.p2}")
    coef = 2.0 ** (q - r) * q / (2.0**q - 1.0)
    term1 = (
        2.0 ** ((1.0 + q / r) * cert.p1)
        * D ** (cert.p1 / r)
        * cert.C1
        * x**-cert.p1
        * float(n) ** (1.0 - cert.p1)
        / (q - cert.p1)
    )
    term2 = (
        2.0 ** ((1.0 + q / r) * cert.p2)
        * D ** (cert.p2 / r)
        * (cert.p2 / (cert.p2 - r)) ** (cert.p2 / r)
        * cert.C2
        * x**-cert.p2
        * float(n) ** (cert.p2 / r - cert.p2)
        / (q - cert.p2)
    )
    return BoundResult.make(
        coef * (term1 + term2),
        {
            "coef": coef,
            "term_increment": coef * term1,
            "term_conditional": coef * term2,
        },
    )
