"""Verification campaigns: grid Monte Carlo against every applicable bound.

A campaign is a flat JSON object (no expressions) naming models, an
(n, x) grid, a path budget, a seed, and bound selectors. Each
(model, n, x, bound) cell becomes one CSV row; a bound without the
certificate it needs on that model is marked skipped rather than failed.
The run falsifies when any applicable cell has ci_low above the bound.
"""

from __future__ import annotations

import io
import csv
import math
from dataclasses import dataclass, field

from . import bounds, optimize, simulate, tails
from .errors import InputError
from .models import MdsModel, model_from_spec
from .simulate import McEstimate

CSV_COLUMNS = [
    "model",
    "n",
    "x",
    "paths",
    "seed",
    "p_hat",
    "ci_low",
    "ci_high",
    "bound_name",
    "bound_value",
    "trivial",
    "dominates",
]

BOUND_SELECTORS = (
    "theorem1",
    "theorem2",
    "corollary",
    "lv",
    "fan",
    "pinelis",       # single-coefficient form as printed; falsifiable, kept for the finding
    "pinelis2",      # classical factor-2 maximal Hoeffding
    "general_q",
    "opt_theorem1",
    "opt_general_q",
)


@dataclass(frozen=True)
class Campaign:
    models: list = field(default_factory=list)  # model spec dicts
    n_grid: list = field(default_factory=list)
    x_grid: list = field(default_factory=list)
    paths: int = 1
    seed: int = 0
    bounds: list = field(default_factory=list)
    output_path: str | None = None  # optional default CSV destination


def parse_campaign(data: dict) -> Campaign:
    """Validate and normalize a campaign object; bad shapes raise InputError."""
    if not isinstance(data, dict):
        raise InputError("campaign must be a JSON object")
    try:
        models = list(data["models"])
        grid = data["grid"]
        n_grid = [int(v) for v in grid["n"]]
        x_grid = [float(v) for v in grid["x"]]
        paths = int(data["paths"])
        seed = int(data["seed"])
        selected = list(data["bounds"])
        output = data.get("output") or {}
        output_path = output.get("path") if isinstance(output, dict) else None
        if output and isinstance(output, dict):
            fmt = output.get("format", "csv")
            if fmt != "csv":
                raise InputError(f"unsupported campaign output format {fmt!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad campaign: {exc!r}") from exc
    if not models:
        raise InputError("campaign needs at least one model")
    if not n_grid or not x_grid:
        raise InputError("campaign grid must be nonempty in both n and x")
    if any(n < 1 for n in n_grid):
        raise InputError("grid n values must be >= 1")
    if any(x <= 0 for x in x_grid):
        raise InputError("grid x values must be positive")
    if paths < 1:
        raise InputError("paths must be >= 1")
    if not selected:
        raise InputError("campaign needs at least one bound selector")
    unknown = [b for b in selected for _ in [0] if b not in BOUND_SELECTORS]
    if unknown:
        raise InputError(f"unknown bound selectors {unknown}; valid: {BOUND_SELECTORS}")
    return Campaign(models, n_grid, x_grid, paths, seed, selected, output_path)


@dataclass(frozen=True)
class VerifyRow:
    model: str
    n: int
    x: float
    paths: int
    seed: int
    p_hat: float
    ci_low: float
    ci_high: float
    bound_name: str
    bound_value: float | None  # None encodes a skipped (inapplicable) cell
    trivial: bool | None
    dominates: bool | None

    def to_json_dict(self) -> dict:
        return {
            "model": self.model,
            "n": self.n,
            "x": self.x,
            "paths": self.paths,
            "seed": self.seed,
            "p_hat": self.p_hat,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "bound_name": self.bound_name,
            "bound_value": self.bound_value,
            "trivial": self.trivial,
            "dominates": "skipped" if self.dominates is None else self.dominates,
        }


def _cert_config(spec: dict, model: MdsModel) -> dict:
    cfg = dict(spec.get("certificates") or {})
    if "exp_alpha" not in cfg:
        cfg["exp_alpha"] = model.default_exp_alpha()
    if "p1" not in cfg or "p2" not in cfg:
        orders = model.default_poly_orders()
        if orders is not None:
            cfg.setdefault("p1", orders[0])
            cfg.setdefault("p2", orders[1])
    cfg.setdefault("lv_p", 3.0)
    cfg.setdefault("corollary_p", 3.0)
    cfg.setdefault("q", None)
    return cfg


def evaluate_bound(
    model: MdsModel, cfg: dict, name: str, n: int, x: float
) -> bounds.BoundResult | None:
    """Bound value for one grid cell, or None when inapplicable to the model."""
    space = model.space
    if name in ("theorem1", "opt_theorem1"):
        alpha = cfg.get("exp_alpha")
        if alpha is None or space.r != 2.0:
            return None
        cert = model.exp_certificate(alpha)
        if cert is None:
            return None
        if name == "theorem1":
            return bounds.theorem1_bound(n, x, space, cert)
        res = optimize.optimize_theorem1(
            n, x, space, cert, optimize.GridSpec(t_points=12, u_points=12)
        )
        return bounds.BoundResult.make(res.value, {"t": res.params["t"], "u": res.params["u"]})
    if name == "fan":
        alpha = cfg.get("exp_alpha")
        if alpha is None or space.kind != "real":
            return None
        c1 = model.exp_moment_constant(alpha)
        if c1 is None:
            return None
        return bounds.fan_real_bound(n, x, alpha, c1)
    if name == "lv":
        p = float(cfg.get("lv_p"))
        if space.kind != "real" or p < 2.0:
            return None
        moment = model.abs_moment(p)
        if moment is None:
            return None
        return bounds.lesigne_volny_bound(n, x, p, moment ** (1.0 / p))
    if name in ("pinelis", "pinelis2"):
        b = model.bound_norm()
        if b is None or space.r != 2.0:
            return None
        form = bounds.pinelis_hoeffding if name == "pinelis" else bounds.maximal_hoeffding
        return bounds.BoundResult.make(form(n, n * x, b, space.D), {"b": b})
    if name in ("theorem2", "general_q", "opt_general_q"):
        p1, p2 = cfg.get("p1"), cfg.get("p2")
        if p1 is None or p2 is None:
            return None
        cert = model.poly_certificate(float(p1), float(p2))
        if cert is None:
            return None
        if name == "theorem2":
            return bounds.theorem2_bound(n, x, space, cert)
        if name == "general_q":
            q = cfg.get("q")
            q = 2.0 * cert.p2 if q is None else float(q)
            if q <= cert.p2:
                return None
            return bounds.theorem2_general_q_bound(q, n, x, space, cert)
        res = optimize.optimize_theorem2_q(
            n, x, space, cert, (1.01 * cert.p2, 10.0 * cert.p2)
        )
        return bounds.BoundResult.make(res.value, {"q": res.params["q"]})
    if name == "corollary":
        p = float(cfg.get("corollary_p"))
        if not model.independent_increments() or p <= space.r:
            return None
        c = tails.n_p(model.norm_tail(), p)
        if math.isinf(c):
            return None
        sup_moment = model.r_moment() ** (p / space.r)
        return bounds.corollary_bound(n, x, space, p, c, sup_moment)
    raise InputError(f"unknown bound selector {name!r}")


def run_verify(campaign: Campaign, threads: int | None = None) -> tuple[list[VerifyRow], bool]:
    """All rows of the campaign in fixed order, plus the global domination flag."""
    rows: list[VerifyRow] = []
    all_dominate = True
    for spec in campaign.models:
        model = model_from_spec(spec)
        cfg = _cert_config(spec, model)
        for n in campaign.n_grid:
            estimates = simulate.mc_deviation_grid(
                model, n, campaign.x_grid, campaign.paths, campaign.seed, threads
            )
            for est in estimates:
                for name in campaign.bounds:
                    rows.append(_make_row(model, cfg, name, est))
                    if rows[-1].dominates is False:
                        all_dominate = False
    return rows, all_dominate


def _make_row(model: MdsModel, cfg: dict, name: str, est: McEstimate) -> VerifyRow:
    result = evaluate_bound(model, cfg, name, est.n, est.x)
    if result is None:
        value = trivial = dominates = None
    else:
        value, trivial = result.value, result.trivial
        dominates = est.ci_low <= value
    return VerifyRow(
        model.label(), est.n, est.x, est.paths, est.seed,
        est.p_hat, est.ci_low, est.ci_high, name, value, trivial, dominates,
    )


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[VerifyRow]) -> str:
    """Fixed-schema CSV; floats use shortest round-trip repr for byte stability."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([
            row.model,
            row.n,
            _cell(row.x),
            row.paths,
            row.seed,
            _cell(row.p_hat),
            _cell(row.ci_low),
            _cell(row.ci_high),
            row.bound_name,
            _cell(row.bound_value),
            _cell(row.trivial),
            "skipped" if row.dominates is None else _cell(row.dominates),
        ])
    return buf.getvalue()
