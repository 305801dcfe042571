"""Martingale-difference models with analytically known tail certificates.

Each model is immutable and samples through the blocked uniform engine in
``rng``: ``slots_per_path(n)`` declares how many uniforms one path of
length n consumes, and ``increments`` maps a (rows, slots) uniform array
to a (rows, n, d) array of increments. Conditional centering is zero for
every bundled variant because increments are sign-symmetric given the
past, which is what makes exact truncation decompositions cheap.

Certificate provenance: constants are computed from the analytic law of
||X_i|| (and of the conditional r-moment), not fitted; defaults for the
smoothness parameters come from the space catalog.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import rng, tails
from .bounds import ExpCertificate, PolyCertificate
from .errors import InputError
from .spaces import SpaceSpec, euclidean, real_line
from .tails import BoundedTail, ParetoTail, TailFunction, WeibullTail


def _direction_slots(space: SpaceSpec) -> int:
    """Uniform slots per step needed to draw one unit direction."""
    if space.d == 1:
        return 1  # a sign
    if space.kind == "euclidean" and space.d == 2:
        return 1  # an angle
    return 2 * ((space.d + 1) // 2)  # Box-Muller pairs, then normalize


def _directions(space: SpaceSpec, u: np.ndarray) -> np.ndarray:
    """Unit vectors (rows, n, d) from uniform slots (rows, n, slots).

    Exactly uniform on the sphere for the real line and the Euclidean
    plane; for other kinds this normalizes Gaussian vectors by the space's
    norm, a documented approximation of the uniform direction law. Norm
    certificates are unaffected: the radius carries the whole norm.
    """
    from .spaces import norm_array

    if space.d == 1:
        return rng.rademacher(u)
    if space.kind == "euclidean" and space.d == 2:
        theta = (2.0 * math.pi) * u[..., 0]
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    g = rng.standard_normals(u)[..., : space.d]
    norms = norm_array(space, g)
    norms = np.where(norms == 0.0, 1.0, norms)
    return g / norms[..., None]


class MdsModel:
    """Base interface; concrete variants fill in sampling and certificates."""

    variant: str
    space: SpaceSpec

    # -- sampling -----------------------------------------------------------
    def slots_per_path(self, n: int) -> int:
        raise NotImplementedError

    def increments(self, n: int, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # -- analytic structure --------------------------------------------------
    def norm_tail(self) -> TailFunction:
        """Law of ||X_i|| as a survival function."""
        raise NotImplementedError

    def cond_tail(self) -> TailFunction:
        """Law of (E[||X_i||^r | F_{i-1}])^(1/r)."""
        raise NotImplementedError

    def bound_norm(self) -> float | None:
        """Almost-sure bound on ||X_i||, when one exists."""
        return None

    def exp_moment_constant(self, alpha: float) -> float | None:
        """E exp{||X_i||^c} when finite (the stronger, moment-form hypothesis)."""
        return None

    def abs_moment(self, p: float) -> float | None:
        """sup_i E||X_i||^p when finite."""
        return None

    def r_moment(self) -> float:
        """E||X_i||^r for the model's space order r."""
        raise NotImplementedError

    def independent_increments(self) -> bool:
        return False

    def symmetric_truncation(self) -> bool:
        """True when E[X_i 1_{||X_i|| <= u} | F_{i-1}] = 0 for every u."""
        return False

    # -- certificates ---------------------------------------------------------
    def exp_certificate(self, alpha: float) -> ExpCertificate | None:
        c1 = tails.exp_tail_constant(self.norm_tail(), alpha)
        if math.isinf(c1):
            return None
        return ExpCertificate(alpha, c1)

    def poly_certificate(self, p1: float, p2: float) -> PolyCertificate | None:
        if p2 < p1 or p1 <= self.space.r:
            return None
        c1 = tails.n_p(self.norm_tail(), p1)
        c2 = tails.n_p(self.cond_tail(), p2)
        if math.isinf(c1) or math.isinf(c2):
            return None
        return PolyCertificate(p1, p2, c1, c2)

    # campaign defaults; None means the certificate family does not apply
    def default_exp_alpha(self) -> float | None:
        return None

    def default_poly_orders(self) -> tuple[float, float] | None:
        return None

    def to_spec(self) -> dict:
        raise NotImplementedError

    def label(self) -> str:
        return self.variant


# --------------------------------------------------------------------------
# Bounded variants
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RademacherReal(MdsModel):
    """Independent signs on the line: ||X_i|| = 1 almost surely."""

    variant: str = field(default="rademacher_real", init=False)
    space: SpaceSpec = field(default_factory=real_line)

    def slots_per_path(self, n):
        return n

    def increments(self, n, u):
        return rng.rademacher(u)[..., None]

    def norm_tail(self):
        return BoundedTail(1.0)

    def cond_tail(self):
        return BoundedTail(1.0)

    def bound_norm(self):
        return 1.0

    def exp_moment_constant(self, alpha):
        return math.e  # E exp{1^c} regardless of the shape

    def abs_moment(self, p):
        return 1.0

    def r_moment(self):
        return 1.0

    def independent_increments(self):
        return True

    def symmetric_truncation(self):
        return True

    def default_exp_alpha(self):
        return 0.5

    def default_poly_orders(self):
        return (3.0, 3.0)

    def to_spec(self):
        return {"variant": self.variant}


@dataclass(frozen=True)
class RademacherCoords(MdsModel):
    """Independent signs in every coordinate; the norm is the constant d^(1/q)."""

    space: SpaceSpec = field(default_factory=lambda: euclidean(3))
    variant: str = field(default="rademacher_coords", init=False)

    def __post_init__(self):
        if self.space.kind == "real":
            raise InputError("rademacher_coords needs a vector-valued space")

    @property
    def _b(self) -> float:
        return self.space.d ** (1.0 / self.space.norm_exponent)

    def slots_per_path(self, n):
        return n * self.space.d

    def increments(self, n, u):
        rows = u.shape[0]
        return rng.rademacher(u).reshape(rows, n, self.space.d)

    def norm_tail(self):
        return BoundedTail(self._b)

    def cond_tail(self):
        return BoundedTail(self._b)

    def bound_norm(self):
        return self._b

    def exp_moment_constant(self, alpha):
        return math.exp(self._b ** (2.0 * alpha / (1.0 - alpha)))

    def abs_moment(self, p):
        return self._b**p

    def r_moment(self):
        return self._b**self.space.r

    def independent_increments(self):
        return True

    def symmetric_truncation(self):
        return True

    def default_exp_alpha(self):
        return 0.5

    def default_poly_orders(self):
        return (3.0, 3.0)

    def to_spec(self):
        return {"variant": self.variant, "space": self.space.to_json_dict()}

    def label(self):
        return f"{self.variant}_d{self.space.d}"


# --------------------------------------------------------------------------
# Radial heavy- and light-tailed variants
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ParetoRadial(MdsModel):
    """Polynomial radius times a symmetric unit direction."""

    p: float = 3.0
    scale: float = 1.0
    space: SpaceSpec = field(default_factory=lambda: euclidean(2))
    variant: str = field(default="pareto_radial", init=False)

    def __post_init__(self):
        if self.p <= self.space.r:
            raise InputError(
                f"pareto_radial needs tail index p > r, got p={self.p}, r={self.space.r}"
            )
        if self.scale <= 0:
            raise InputError("scale must be positive")

    def slots_per_path(self, n):
        return n * (1 + _direction_slots(self.space))

    def increments(self, n, u):
        radius = rng.pareto(u[:, :n], self.p, self.scale)
        dir_u = u[:, n:].reshape(u.shape[0], n, _direction_slots(self.space))
        return radius[..., None] * _directions(self.space, dir_u)

    def norm_tail(self):
        return ParetoTail(self.p, self.scale)

    def cond_tail(self):
        return BoundedTail(self.r_moment() ** (1.0 / self.space.r))

    def abs_moment(self, p):
        if p >= self.p:
            return None
        return self.p / (self.p - p) * self.scale**p

    def r_moment(self):
        r = self.space.r
        return self.p / (self.p - r) * self.scale**r

    def independent_increments(self):
        return True

    def symmetric_truncation(self):
        return True

    def default_poly_orders(self):
        return (self.p, self.p)

    def to_spec(self):
        return {
            "variant": self.variant,
            "p": self.p,
            "scale": self.scale,
            "space": self.space.to_json_dict(),
        }

    def label(self):
        return f"{self.variant}_p{self.p:g}_d{self.space.d}"


@dataclass(frozen=True)
class WeibullRadial(MdsModel):
    """Stretched-exponential radius times a symmetric unit direction.

    The radius survival is exp(-t^c) with c = 2*alpha/(1-alpha), so the
    weak exponential tail constant at this alpha is exactly 1. The moment
    form E exp{||X||^c} diverges, which is what separates this model from
    the bounded ones in comparison campaigns.
    """

    alpha: float = 0.5
    space: SpaceSpec = field(default_factory=lambda: euclidean(2))
    variant: str = field(default="weibull_radial", init=False)

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def _c(self) -> float:
        return 2.0 * self.alpha / (1.0 - self.alpha)

    def slots_per_path(self, n):
        return n * (1 + _direction_slots(self.space))

    def increments(self, n, u):
        radius = rng.weibull_like(u[:, :n], self.alpha)
        dir_u = u[:, n:].reshape(u.shape[0], n, _direction_slots(self.space))
        return radius[..., None] * _directions(self.space, dir_u)

    def norm_tail(self):
        return WeibullTail(self.alpha)

    def cond_tail(self):
        return BoundedTail(self.r_moment() ** (1.0 / self.space.r))

    def abs_moment(self, p):
        return float(special.gamma(p / self._c + 1.0))

    def r_moment(self):
        return float(special.gamma(self.space.r / self._c + 1.0))

    def independent_increments(self):
        return True

    def symmetric_truncation(self):
        return True

    def default_exp_alpha(self):
        return self.alpha

    def default_poly_orders(self):
        return (3.0, 3.0)

    def to_spec(self):
        return {
            "variant": self.variant,
            "alpha": self.alpha,
            "space": self.space.to_json_dict(),
        }

    def label(self):
        return f"{self.variant}_a{self.alpha:g}_d{self.space.d}"


# --------------------------------------------------------------------------
# Dependent variants
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ProductY0(MdsModel):
    """X_i = Y_0 * Y_i: one heavy radius per path, fresh signs per step.

    A martingale difference sequence whose conditional exponential moment
    E[exp{delta |X_i|} | F_{i-1}] = exp{delta |Y_0|} is unbounded over
    paths, while the unconditional weak tail constant at this alpha is
    exactly 1. |X_i| = |Y_0| for every i within a path.
    """

    alpha: float = 0.5
    space: SpaceSpec = field(default_factory=real_line, init=False)
    variant: str = field(default="product_y0", init=False)

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def _c(self) -> float:
        return 2.0 * self.alpha / (1.0 - self.alpha)

    def slots_per_path(self, n):
        return 1 + n

    def increments(self, n, u):
        y0 = rng.weibull_like(u[:, :1], self.alpha)
        signs = rng.rademacher(u[:, 1:])
        return (y0 * signs)[..., None]

    def norm_tail(self):
        return WeibullTail(self.alpha)

    def cond_tail(self):
        # (E[|X_i|^r | F_{i-1}])^(1/r) = |Y_0|, a genuinely random conditional moment
        return WeibullTail(self.alpha)

    def abs_moment(self, p):
        return float(special.gamma(p / self._c + 1.0))

    def r_moment(self):
        return float(special.gamma(self.space.r / self._c + 1.0))

    def independent_increments(self):
        return False

    def symmetric_truncation(self):
        # E[X_i 1_{|X_i| <= u} | F_{i-1}] = Y_0 1_{|Y_0| <= u} E[Y_i] = 0
        return True

    def default_exp_alpha(self):
        return self.alpha

    def default_poly_orders(self):
        return (3.0, 4.0)

    def to_spec(self):
        return {"variant": self.variant, "alpha": self.alpha}

    def label(self):
        return f"{self.variant}_a{self.alpha:g}"


@dataclass(frozen=True)
class ParetoScaleRademacher(MdsModel):
    """X_i = V_{i-1} * Y_i: a predictable Pareto scale and a fresh sign.

    The filtration carries the scales, so the conditional r-moment root
    (E[|X_i|^r | F_{i-1}])^(1/r) = V_{i-1} has a genuine polynomial tail
    with N_{p2} = 1 for p2 <= p. The increments are nevertheless an
    independent sequence, since (V_{i-1}, Y_i) pairs never overlap.
    """

    p: float = 4.0
    space: SpaceSpec = field(default_factory=real_line, init=False)
    variant: str = field(default="pareto_scale_rademacher", init=False)

    def __post_init__(self):
        if self.p <= self.space.r:
            raise InputError(
                f"pareto_scale_rademacher needs p > r, got p={self.p}, r={self.space.r}"
            )

    def slots_per_path(self, n):
        return 2 * n

    def increments(self, n, u):
        scales = rng.pareto(u[:, :n], self.p)
        signs = rng.rademacher(u[:, n:])
        return (scales * signs)[..., None]

    def norm_tail(self):
        return ParetoTail(self.p, 1.0)

    def cond_tail(self):
        return ParetoTail(self.p, 1.0)

    def abs_moment(self, p):
        if p >= self.p:
            return None
        return self.p / (self.p - p)

    def r_moment(self):
        r = self.space.r
        return self.p / (self.p - r)

    def independent_increments(self):
        return True

    def symmetric_truncation(self):
        # |X_i| = V_{i-1} is measurable in the past, and E[Y_i] = 0
        return True

    def default_poly_orders(self):
        return (self.p - 1.0, self.p)

    def to_spec(self):
        return {"variant": self.variant, "p": self.p}

    def label(self):
        return f"{self.variant}_p{self.p:g}"


# --------------------------------------------------------------------------
# Registry
# --------------------------------------------------------------------------

def _space_from(spec: dict, default: SpaceSpec) -> SpaceSpec:
    if "space" in spec and spec["space"] is not None:
        return SpaceSpec.from_json_dict(spec["space"])
    d = spec.get("d")
    q = spec.get("q")
    if d is None and q is None:
        return default
    d = int(d) if d is not None else default.d
    if q is not None:
        from .spaces import ell_q_space

        return ell_q_space(d, float(q))
    return euclidean(d) if d > 1 else real_line()


def model_from_spec(spec: dict) -> MdsModel:
    """Build a model from its JSON spec; unknown variants raise InputError."""
    if not isinstance(spec, dict) or "variant" not in spec:
        raise InputError("model spec must be an object with a 'variant' key")
    variant = spec["variant"]
    if variant == "rademacher_real":
        return RademacherReal()
    if variant == "rademacher_coords":
        return RademacherCoords(space=_space_from(spec, euclidean(3)))
    if variant == "pareto_radial":
        return ParetoRadial(
            p=float(spec.get("p", 3.0)),
            scale=float(spec.get("scale", 1.0)),
            space=_space_from(spec, euclidean(2)),
        )
    if variant == "weibull_radial":
        return WeibullRadial(
            alpha=float(spec.get("alpha", 0.5)),
            space=_space_from(spec, euclidean(2)),
        )
    if variant == "product_y0":
        return ProductY0(alpha=float(spec.get("alpha", 0.5)))
    if variant == "pareto_scale_rademacher":
        return ParetoScaleRademacher(p=float(spec.get("p", 4.0)))
    raise InputError(f"unknown model variant {variant!r}")


def bundled_models() -> list[MdsModel]:
    """The default verification fleet with its analytic certificates."""
    return [
        RademacherReal(),
        RademacherCoords(space=euclidean(3)),
        ParetoRadial(p=3.0, space=euclidean(2)),
        WeibullRadial(alpha=0.5, space=euclidean(2)),
        ProductY0(alpha=0.5),
        ParetoScaleRademacher(p=4.0),
    ]
