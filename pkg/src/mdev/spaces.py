"""Concrete smooth Banach spaces: norms, catalog defaults, empirical checks.

Every space here is a finite-dimensional representative; pick the dimension
you need, there is no automatic truncation logic. The pair (r, D) is the
user's smoothness claim about the space: with convention ``paper_eq7`` it
asserts E||X_1+...+X_n||^r <= D * sum_i E||X_i||^r for every martingale
difference sequence; with convention ``pinelis_squared`` (r = 2 only) it
asserts E||S_n||^2 <= D^2 * sum_i E||X_i||^2. Bound formulas take D
literally, so the convention field exists to record which inequality a
stored D value is known to satisfy rather than silently reconciling the
two usages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from . import rng

KINDS = ("real", "euclidean", "ell_q", "ell_r")
CONVENTIONS = ("paper_eq7", "pinelis_squared")


@dataclass(frozen=True)
class SpaceSpec:
    kind: str = "real"
    d: int = 1
    q: float | None = None  # norm exponent, only for ell_q / ell_r kinds
    r: float = 2.0
    D: float = 1.0
    convention: str = "paper_eq7"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown space kind {self.kind!r}")
        if self.convention not in CONVENTIONS:
            raise InputError(f"unknown convention {self.convention!r}")
        if not 1.0 < self.r <= 2.0:
            raise InputError(f"smoothness order r must lie in (1, 2], got {self.r}")
        if not self.D > 0:
            raise InputError(f"smoothness constant D must be positive, got {self.D}")
        if self.d < 1:
            raise InputError(f"dimension must be >= 1, got {self.d}")
        if self.kind == "real" and self.d != 1:
            raise InputError("kind 'real' is one-dimensional")
        if self.kind == "ell_q":
            if self.q is None or self.q < 2:
                raise InputError("ell_q needs norm exponent q >= 2")
        elif self.kind == "ell_r":
            if self.q is None or not 1.0 < self.q <= 2.0:
                raise InputError("ell_r needs norm exponent q in (1, 2]")
            if self.q != self.r:
                raise InputError("ell_r norm exponent must equal the smoothness order r")
        elif self.q is not None:
            raise InputError(f"kind {self.kind!r} does not take a norm exponent")
        if self.convention == "pinelis_squared" and self.r != 2.0:
            raise InputError("pinelis_squared convention is defined for r = 2 only")

    @property
    def norm_exponent(self) -> float:
        """Exponent of the coordinate norm (2 for real/euclidean)."""
        return 2.0 if self.kind in ("real", "euclidean") else float(self.q)

    def to_json_dict(self) -> dict:
        out = {"kind": self.kind, "d": self.d}
        if self.q is not None:
            out["q"] = self.q
        out.update({"r": self.r, "D": self.D, "convention": self.convention})
        return out

    @staticmethod
    def from_json_dict(data: dict) -> "SpaceSpec":
        try:
            return SpaceSpec(
                kind=data.get("kind", "real"),
                d=int(data.get("d", 1)),
                q=data.get("q"),
                r=float(data.get("r", 2.0)),
                D=float(data.get("D", 1.0)),
                convention=data.get("convention", "paper_eq7"),
            )
        except (TypeError, KeyError) as exc:
            raise InputError(f"bad space spec: {exc}") from exc


@dataclass(frozen=True)
class Point:
    """A vector tagged with the space it lives in."""

    space: SpaceSpec
    coords: tuple[float, ...]

    def __post_init__(self):
        if len(self.coords) != self.space.d:
            raise InputError(
                f"point has {len(self.coords)} coordinates, space has d={self.space.d}"
            )


# --------------------------------------------------------------------------
# Catalog
#
# Default D values come from classical smooth-space constants, not from any
# property of the models bundled here: Hilbert spaces satisfy the r=2
# inequality with D=1 exactly (orthogonality of martingale increments);
# ell^q with q >= 2 satisfies the squared convention with D = sqrt(q-1)
# (two-point smoothness inequality); ell^r with 1 < r <= 2 satisfies the
# plain convention with D = 2 by coordinatewise von Bahr-Esseen.
# --------------------------------------------------------------------------

def real_line() -> SpaceSpec:
    return SpaceSpec(kind="real", d=1, r=2.0, D=1.0, convention="paper_eq7")


def euclidean(d: int) -> SpaceSpec:
    return SpaceSpec(kind="euclidean", d=d, r=2.0, D=1.0, convention="paper_eq7")


def ell_q_space(d: int, q: float) -> SpaceSpec:
    return SpaceSpec(
        kind="ell_q", d=d, q=q, r=2.0, D=math.sqrt(q - 1.0), convention="pinelis_squared"
    )


def ell_r_space(d: int, r: float) -> SpaceSpec:
    return SpaceSpec(kind="ell_r", d=d, q=r, r=r, D=2.0, convention="paper_eq7")


def catalog() -> dict[str, SpaceSpec]:
    """Representative instances, one per kind."""
    return {
        "real": real_line(),
        "euclidean2": euclidean(2),
        "euclidean3": euclidean(3),
        "ell_q(2,4)": ell_q_space(2, 4.0),
        "ell_r(3,1.5)": ell_r_space(3, 1.5),
    }


# --------------------------------------------------------------------------
# Norms
# --------------------------------------------------------------------------

def norm_array(space: SpaceSpec, a: np.ndarray, axis: int = -1) -> np.ndarray:
    """Norm of vectors along ``axis``; the array's length there must be d."""
    if a.shape[axis] != space.d:
        raise InputError(
            f"array has {a.shape[axis]} coordinates along axis {axis}, space has d={space.d}"
        )
    if space.kind == "real":
        return np.abs(a).sum(axis=axis)  # single coordinate
    if space.kind == "euclidean":
        return np.sqrt(np.square(a).sum(axis=axis))
    q = float(space.q)
    return np.power(np.power(np.abs(a), q).sum(axis=axis), 1.0 / q)


def norm(space: SpaceSpec, point: Point | np.ndarray | list) -> float:
    """Norm of a single point; validates dimension."""
    if isinstance(point, Point):
        if point.space != space:
            raise InputError("point belongs to a different space")
        coords = np.asarray(point.coords, dtype=float)
    else:
        coords = np.asarray(point, dtype=float)
        if coords.ndim != 1:
            raise InputError("expected a flat coordinate vector")
    return float(norm_array(space, coords))


def unit_vectors(space: SpaceSpec, count: int, seed: int) -> np.ndarray:
    """Sampled unit-norm vectors, shape (count, d). Deterministic in seed."""
    d = space.d
    if d == 1:
        u = rng.uniform_block(seed, 0, count, 1)
        return rng.rademacher(u)
    slots = 2 * ((d + 1) // 2)
    u = rng.uniform_block(seed, 0, count, slots)
    g = rng.standard_normals(u)[:, :d]
    norms = norm_array(space, g)
    norms = np.where(norms == 0.0, 1.0, norms)
    return g / norms[:, None]


# --------------------------------------------------------------------------
# Empirical smoothness checks
# --------------------------------------------------------------------------

def smoothness_scan(
    space: SpaceSpec, t_grid: list[float], pair_samples: int, seed: int = 0
) -> float:
    """Sampled lower estimate of the smoothness modulus supremum.

    Maximizes (||x+ty|| + ||x-ty|| - 2) / t^r over sampled unit pairs (x, y)
    and t in the grid. This is a lower estimate of the true supremum, never
    a claim about it.
    """
    if not t_grid:
        raise InputError("t_grid must be nonempty")
    if any(t <= 0 for t in t_grid):
        raise InputError("t values must be positive")
    if pair_samples < 1:
        raise InputError("pair_samples must be >= 1")
    xs = unit_vectors(space, pair_samples, seed)
    ys = unit_vectors(space, pair_samples, seed + 1)
    best = -math.inf
    for t in t_grid:
        plus = norm_array(space, xs + t * ys)
        minus = norm_array(space, xs - t * ys)
        val = float((plus + minus - 2.0).max()) / t**space.r
        best = max(best, val)
    return best


def empirical_eq7_ratio(
    space: SpaceSpec, model, n: int, paths: int, seed: int = 0
) -> tuple[float, bool]:
    """Monte Carlo ratio of E||S_n||^rho to the smoothness right-hand side.

    With convention ``paper_eq7`` the denominator is D * sum_i E||X_i||^r
    (rho = r); with ``pinelis_squared`` it is D^2 * sum_i E||X_i||^2
    (rho = 2). Returns (ratio, degenerate); an all-zero model yields
    (0.0, True) rather than an error.
    """
    from . import simulate  # local import: simulate builds on spaces

    if model.space != space:
        raise InputError("model increments do not live in the given space")
    if space.convention == "pinelis_squared":
        rho, denom_scale = 2.0, space.D**2
    else:
        rho, denom_scale = space.r, space.D
    sum_moment, step_moments = simulate.moment_estimates(model, n, paths, seed, rho)
    denominator = denom_scale * float(sum(step_moments))
    if denominator == 0.0:
        return 0.0, True
    return sum_moment / denominator, False
