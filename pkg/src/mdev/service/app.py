"""FastAPI service wrapping the bound, simulation, and optimization toolkit.

The CLI is a thin client of these endpoints; anything it can do, another
client can do over HTTP. Handlers validate domain preconditions through
the core package and translate its exceptions: InputError family -> 400,
NumericError -> 500 with a numeric marker the CLI maps to exit code 3.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, bounds, campaign, optimize, simulate, spaces
from ..errors import InputError, NumericError
from ..models import bundled_models, model_from_spec
from . import schemas


def _need(req: schemas.BoundRequest, *names: str) -> list:
    values = []
    missing = []
    for name in names:
        val = getattr(req, name)
        if val is None:
            missing.append(name)
        values.append(val)
    if missing:
        raise InputError(f"{req.selector} needs {', '.join(missing)}")
    return values


def _dispatch_bound(req: schemas.BoundRequest) -> bounds.BoundResult:
    space = req.space.to_spec()
    sel = req.selector
    if sel == "theorem1":
        n, x, alpha, c1 = _need(req, "n", "x", "alpha", "C1")
        return bounds.theorem1_bound(n, x, space, bounds.ExpCertificate(alpha, c1))
    if sel == "pretrunc":
        total_x, n, t, u, alpha, c1 = _need(req, "total_x", "n", "t", "u", "alpha", "C1")
        return bounds.pretrunc_bound(total_x, n, t, u, space, bounds.ExpCertificate(alpha, c1))
    if sel == "theorem2":
        n, x, p1, p2, c1, c2 = _need(req, "n", "x", "p1", "p2", "C1", "C2")
        return bounds.theorem2_bound(n, x, space, bounds.PolyCertificate(p1, p2, c1, c2))
    if sel == "general_q":
        q, n, x, p1, p2, c1, c2 = _need(req, "q", "n", "x", "p1", "p2", "C1", "C2")
        return bounds.theorem2_general_q_bound(
            q, n, x, space, bounds.PolyCertificate(p1, p2, c1, c2)
        )
    if sel == "corollary":
        n, x, p, c, sup_moment = _need(req, "n", "x", "p", "C", "sup_moment")
        return bounds.corollary_bound(n, x, space, p, c, sup_moment)
    if sel == "lv":
        n, x, p, m = _need(req, "n", "x", "p", "M")
        return bounds.lesigne_volny_bound(n, x, p, m)
    if sel == "fan":
        n, x, alpha, c1 = _need(req, "n", "x", "alpha", "C1")
        return bounds.fan_real_bound(n, x, alpha, c1)
    if sel == "pinelis":
        n, x_abs, b = _need(req, "n", "x_abs", "b")
        value = bounds.pinelis_hoeffding(n, x_abs, b, space.D)
        return bounds.BoundResult.make(value, {"b": b})
    raise InputError(f"unknown selector {sel!r}")


def create_app() -> FastAPI:
    app = FastAPI(title="mdev", version=__version__)

    @app.exception_handler(InputError)
    async def _input_error(request: Request, exc: InputError):
        return JSONResponse(status_code=400, content={"detail": str(exc), "kind": "input"})

    @app.exception_handler(NumericError)
    async def _numeric_error(request: Request, exc: NumericError):
        return JSONResponse(
            status_code=500,
            content={"detail": str(exc), "kind": "numeric", "achieved": exc.achieved},
        )

    @app.exception_handler(OverflowError)
    async def _overflow_error(request: Request, exc: OverflowError):
        return JSONResponse(
            status_code=500,
            content={"detail": f"float overflow: {exc}", "kind": "numeric", "achieved": None},
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/spaces")
    def space_catalog():
        return {name: spec.to_json_dict() for name, spec in spaces.catalog().items()}

    @app.get("/models")
    def model_catalog():
        return {m.label(): m.to_spec() for m in bundled_models()}

    @app.post("/bound", response_model=schemas.BoundResponse)
    def bound(req: schemas.BoundRequest):
        return _dispatch_bound(req).to_json_dict()

    @app.post("/exact", response_model=schemas.ExactResponse)
    def exact(req: schemas.ExactRequest):
        prob = simulate.exact_deviation_prob_rademacher(req.n, req.x)
        total = 2**req.n
        hits = int(prob * total)
        return {"p": str(prob), "hits": hits, "total": total, "n": req.n, "x": req.x}

    @app.post("/simulate", response_model=schemas.SimulateResponse, response_model_by_alias=True)
    def run_simulate(req: schemas.SimulateRequest):
        model = model_from_spec(req.model_spec.to_spec_dict())
        est = simulate.mc_deviation_prob(model, req.n, req.x, req.paths, req.seed)
        out = est.to_json_dict()
        out["model"] = model.to_spec()
        return out

    @app.post("/rate", response_model=schemas.RateResponse)
    def rate(req: schemas.RateRequest):
        if req.points is not None:
            pts = [(pt.n, pt.p_hat) for pt in req.points]
        else:
            if req.model_spec is None or not req.n_grid or req.x is None or not req.paths:
                raise InputError("rate needs either points or model + n_grid + x + paths")
            model = model_from_spec(req.model_spec.to_spec_dict())
            pts = []
            for n in req.n_grid:
                est = simulate.mc_deviation_prob(model, n, req.x, req.paths, req.seed)
                pts.append((float(n), est.p_hat))
        fit = simulate.rate_fit(pts, req.family, req.alpha)
        out = fit.to_json_dict()
        out["alpha"] = req.alpha
        out["seed"] = req.seed
        out["points"] = [{"n": n, "p_hat": p} for n, p in pts]
        return out

    @app.post("/optimize", response_model=schemas.OptimizeResponse)
    def run_optimize(req: schemas.OptimizeRequest):
        space = req.space.to_spec()
        if req.kind == "theorem1":
            if req.alpha is None or req.C1 is None:
                raise InputError("theorem1 optimization needs alpha and C1")
            cert = bounds.ExpCertificate(req.alpha, req.C1)
            grid = optimize.GridSpec(req.t_points, req.u_points, req.u_max)
            res = optimize.optimize_theorem1(req.n, req.x, space, cert, grid, req.trace)
        else:
            if None in (req.p1, req.p2, req.C1, req.C2):
                raise InputError("theorem2_q optimization needs p1, p2, C1, C2")
            cert = bounds.PolyCertificate(req.p1, req.p2, req.C1, req.C2)
            if req.q_lo is None or req.q_hi is None:
                raise InputError("theorem2_q optimization needs the bracket q_lo, q_hi")
            res = optimize.optimize_theorem2_q(
                req.n, req.x, space, cert, (req.q_lo, req.q_hi), trace=req.trace
            )
        out = res.to_json_dict()
        out.update(kind=req.kind, n=req.n, x=req.x)
        return out

    @app.post("/verify", response_model=schemas.VerifyResponse)
    def verify(req: schemas.CampaignModel):
        camp = campaign.parse_campaign(req.to_campaign_dict())
        rows, all_dominate = campaign.run_verify(camp)
        return {
            "all_dominate": all_dominate,
            "rows": [row.to_json_dict() for row in rows],
            "csv": campaign.rows_to_csv(rows),
            "output_path": camp.output_path,
        }

    return app


app = create_app()
