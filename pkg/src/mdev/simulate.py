"""Monte Carlo deviation estimation, exact enumeration, truncation, rate fits.

The engine is deterministic for fixed (model, n, x, paths, seed) no matter
how many workers run: paths are partitioned into the fixed blocks of
``rng``, each block draws from its own keyed stream, and the reduction is
a commutative sum of per-block integer hit counts. ``MDEV_THREADS``
selects the worker count (default: available parallelism); any value >= 1
yields identical results.

The hit test is strict, max_k ||S_k|| > n*x, so boundary ties on lattice
models count as non-hits. The exact enumeration oracle applies the same
convention with rational arithmetic on the binary value of x.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import stats

from . import rng
from .errors import CapabilityError, InputError, InsufficientDataError
from .models import MdsModel
from .spaces import norm_array


def mdev_threads() -> int:
    """Worker count from MDEV_THREADS, defaulting to available parallelism."""
    raw = os.environ.get("MDEV_THREADS", "").strip()
    if raw:
        try:
            value = int(raw)
        except ValueError as exc:
            raise InputError(f"MDEV_THREADS must be an integer, got {raw!r}") from exc
        if value < 1:
            raise InputError(f"MDEV_THREADS must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


def _map_blocks(fn: Callable[[int, int], object], paths: int, threads: int | None) -> list:
    """Evaluate fn(block_index, rows) over all blocks, results in block order."""
    blocks = list(rng.block_ranges(paths))
    workers = threads if threads is not None else mdev_threads()
    if workers <= 1 or len(blocks) <= 1:
        return [fn(b, m) for b, m in blocks]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(lambda bm: fn(*bm), blocks))


# --------------------------------------------------------------------------
# Sampling
# --------------------------------------------------------------------------

def _block_increments(model: MdsModel, n: int, seed: int, block: int, rows: int) -> np.ndarray:
    u = rng.uniform_block(seed, block, rows, model.slots_per_path(n))
    return model.increments(n, u)


def sample_path(model: MdsModel, n: int, seed: int = 0) -> np.ndarray:
    """Increments of the first path of the seed's block 0, shape (n, d).

    This is exactly path index 0 of any Monte Carlo run with the same seed.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    return _block_increments(model, n, seed, 0, 1)[0]


def increment_samples(model: MdsModel, count: int, seed: int = 0) -> np.ndarray:
    """First increments of ``count`` independent paths, shape (count, d)."""
    if count < 1:
        raise InputError(f"count must be >= 1, got {count}")
    parts = _map_blocks(
        lambda b, m: _block_increments(model, 1, seed, b, m)[:, 0, :], count, None
    )
    return np.concatenate(parts, axis=0)


def increment_norms(model: MdsModel, increments: np.ndarray) -> np.ndarray:
    """Norms along the coordinate axis in the model's space."""
    return norm_array(model.space, increments)


def increment_norm_samples(model: MdsModel, count: int, seed: int = 0) -> np.ndarray:
    """Norm samples of the increment law, shape (count,)."""
    return increment_norms(model, increment_samples(model, count, seed))


def path_maxima(
    model: MdsModel, n: int, paths: int, seed: int = 0, threads: int | None = None
) -> np.ndarray:
    """max_k ||S_k|| for each path, shape (paths,); block order is fixed."""
    if n < 1 or paths < 1:
        raise InputError("n and paths must be >= 1")

    def one(block: int, rows: int) -> np.ndarray:
        inc = _block_increments(model, n, seed, block, rows)
        sums = np.cumsum(inc, axis=1)
        return norm_array(model.space, sums, axis=2).max(axis=1)

    return np.concatenate(_map_blocks(one, paths, threads))


# --------------------------------------------------------------------------
# Deviation probability estimation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class McEstimate:
    p_hat: float
    paths: int
    hits: int
    ci_low: float
    ci_high: float
    seed: int
    n: int
    x: float

    def to_json_dict(self) -> dict:
        return {
            "p_hat": self.p_hat,
            "paths": self.paths,
            "hits": self.hits,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "seed": self.seed,
            "n": self.n,
            "x": self.x,
        }


def clopper_pearson(hits: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Exact binomial confidence interval at the given coverage level."""
    if not 0 <= hits <= trials or trials < 1:
        raise InputError("need 0 <= hits <= trials with trials >= 1")
    a = 1.0 - level
    lo = 0.0 if hits == 0 else float(stats.beta.ppf(a / 2.0, hits, trials - hits + 1))
    hi = 1.0 if hits == trials else float(stats.beta.ppf(1.0 - a / 2.0, hits + 1, trials - hits))
    return lo, hi


def mc_deviation_grid(
    model: MdsModel,
    n: int,
    xs: Sequence[float],
    paths: int,
    seed: int = 0,
    threads: int | None = None,
) -> list[McEstimate]:
    """Estimates of P(max_k ||S_k|| > n*x) for several x over one path set.

    Sharing paths across levels keeps grid campaigns cheap; each estimate
    equals what ``mc_deviation_prob`` returns at that x with the same seed.
    """
    if n < 1 or paths < 1:
        raise InputError("n and paths must be >= 1")
    if not xs:
        raise InputError("xs must be nonempty")
    thresholds = np.array([n * float(x) for x in xs])

    def one(block: int, rows: int) -> np.ndarray:
        inc = _block_increments(model, n, seed, block, rows)
        sums = np.cumsum(inc, axis=1)
        maxima = norm_array(model.space, sums, axis=2).max(axis=1)
        return (maxima[:, None] > thresholds[None, :]).sum(axis=0)

    hits = np.sum(_map_blocks(one, paths, threads), axis=0)
    out = []
    for x, h in zip(xs, hits):
        h = int(h)
        lo, hi = clopper_pearson(h, paths)
        out.append(McEstimate(h / paths, paths, h, lo, hi, seed, n, float(x)))
    return out


def mc_deviation_prob(
    model: MdsModel,
    n: int,
    x: float,
    paths: int,
    seed: int = 0,
    threads: int | None = None,
) -> McEstimate:
    """Estimate of P(max_k ||S_k|| > n*x); strict inequality at the threshold."""
    return mc_deviation_grid(model, n, [x], paths, seed, threads)[0]


def moment_estimates(
    model: MdsModel, n: int, paths: int, seed: int = 0, rho: float = 2.0
) -> tuple[float, list[float]]:
    """Monte Carlo (E||S_n||^rho, [E||X_i||^rho per step]) in the model's norm."""
    if n < 1 or paths < 1:
        raise InputError("n and paths must be >= 1")

    def one(block: int, rows: int) -> tuple[float, np.ndarray]:
        inc = _block_increments(model, n, seed, block, rows)
        step = np.power(norm_array(model.space, inc, axis=2), rho).sum(axis=0)
        total = float(
            np.power(norm_array(model.space, inc.sum(axis=1)), rho).sum()
        )
        return total, step

    parts = _map_blocks(one, paths, None)
    sum_total = sum(t for t, _ in parts)
    step_totals = np.sum([s for _, s in parts], axis=0)
    return sum_total / paths, [float(s) / paths for s in step_totals]


# --------------------------------------------------------------------------
# Exact enumeration oracle for the sign walk
# --------------------------------------------------------------------------

def exact_deviation_prob_rademacher(n: int, x: float | Fraction) -> Fraction:
    """Exact P(max_k |S_k| > n*x) for independent signs, as a rational number.

    The threshold is the exact binary value of x (floats convert exactly),
    so tie handling matches the strict float comparison of the Monte Carlo
    engine. Counts walk states with an absorbing barrier, which reproduces
    full 2^n enumeration at polynomial cost; capped at n <= 24.
    """
    if n < 1 or n > 24:
        raise InputError(f"exact enumeration supports 1 <= n <= 24, got {n}")
    threshold = Fraction(n) * Fraction(x)
    barrier = int(threshold) + 1 if threshold == int(threshold) else math.floor(threshold) + 1
    if barrier > n:
        return Fraction(0)
    counts: dict[int, int] = {0: 1}
    absorbed = 0
    for k in range(1, n + 1):
        nxt: dict[int, int] = {}
        for s, c in counts.items():
            for step in (-1, 1):
                t = s + step
                if abs(t) >= barrier:
                    absorbed += c * 2 ** (n - k)
                else:
                    nxt[t] = nxt.get(t, 0) + c
        counts = nxt
    return Fraction(absorbed, 2**n)


# --------------------------------------------------------------------------
# Truncation decomposition
# --------------------------------------------------------------------------

def truncate_decompose(
    model: MdsModel, path: np.ndarray, u: float
) -> tuple[np.ndarray, np.ndarray]:
    """Split increments into the recentered below-u and above-u parts.

    For sign-symmetric models the conditional recentering terms vanish, so
    X' = X 1_{||X|| <= u} and X'' = X 1_{||X|| > u}; the sum reconstructs
    the path exactly and ||X'|| <= u pointwise, well inside the generic 2u
    cap that recentering would cost. Models without zero conditional
    truncation means are rejected.
    """
    if u < 0:
        raise InputError(f"truncation level u must be nonnegative, got {u}")
    if not model.symmetric_truncation():
        raise CapabilityError(
            f"model {model.variant} has no computable conditional truncation mean"
        )
    arr = np.asarray(path, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.shape[1] != model.space.d:
        raise InputError(
            f"path has {arr.shape[1]} coordinates, model space has d={model.space.d}"
        )
    norms = norm_array(model.space, arr)
    below = (norms <= u)[:, None]
    x_low = np.where(below, arr, 0.0)
    return x_low, arr - x_low


# --------------------------------------------------------------------------
# Rate fitting
# --------------------------------------------------------------------------

RATE_FAMILIES = ("log_linear_in_n_alpha", "log_log")


@dataclass(frozen=True)
class RateFit:
    slope: float
    stderr: float
    intercept: float
    family: str
    used: list = field(default_factory=list)
    dropped: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "slope": self.slope,
            "stderr": self.stderr,
            "intercept": self.intercept,
            "family": self.family,
            "used": list(self.used),
            "dropped": list(self.dropped),
        }


def _as_points(estimates: Iterable) -> list[tuple[float, float]]:
    pts = []
    for e in estimates:
        if isinstance(e, McEstimate):
            pts.append((float(e.n), float(e.p_hat)))
        elif isinstance(e, dict):
            pts.append((float(e["n"]), float(e["p_hat"])))
        else:
            n, p_hat = e
            pts.append((float(n), float(p_hat)))
    return pts


def rate_fit(estimates: Iterable, family: str, alpha: float | None = None) -> RateFit:
    """Least-squares decay rate of log p_hat against n^alpha or log n.

    Zero-hit points cannot enter a log fit; they are dropped and reported.
    Needs at least three usable points.
    """
    if family not in RATE_FAMILIES:
        raise InputError(f"unknown rate family {family!r}; pick one of {RATE_FAMILIES}")
    if family == "log_linear_in_n_alpha":
        if alpha is None or not 0.0 < alpha < 1.0:
            raise InputError("log_linear_in_n_alpha needs alpha in (0, 1)")
    pts = _as_points(estimates)
    used = [(n, p) for n, p in pts if p > 0.0]
    dropped = [n for n, p in pts if p <= 0.0]
    if len(used) < 3:
        raise InsufficientDataError(
            f"need >= 3 points with p_hat > 0, have {len(used)} usable"
        )
    ns = np.array([n for n, _ in used])
    y = np.log(np.array([p for _, p in used]))
    t = ns**alpha if family == "log_linear_in_n_alpha" else np.log(ns)
    m = len(used)
    t_mean, y_mean = t.mean(), y.mean()
    sxx = float(np.sum((t - t_mean) ** 2))
    if sxx == 0.0:
        raise InsufficientDataError("regressor grid is degenerate")
    slope = float(np.sum((t - t_mean) * (y - y_mean)) / sxx)
    intercept = float(y_mean - slope * t_mean)
    resid = y - (intercept + slope * t)
    sigma2 = float(np.sum(resid**2) / (m - 2)) if m > 2 else 0.0
    stderr = math.sqrt(sigma2 / sxx)
    return RateFit(slope, stderr, intercept, family,
                   used=[n for n, _ in used], dropped=dropped)
