"""Thin command-line client for the bound service.

Every subcommand builds one HTTP request. By default the service runs
in-process over an ASGI transport, so no daemon is needed and outputs are
byte-reproducible; pass --server to target a running instance instead.

Exit codes: 0 success (for verify: every applicable bound dominates),
1 a domination check falsified, 2 usage or input error, 3 numeric failure.
All seeds are explicit flags with constant defaults; nothing reads clocks.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import json
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_FALSIFIED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

BOUND_SELECTORS = (
    "theorem1", "theorem2", "corollary", "lv", "fan", "pinelis", "pretrunc", "general_q",
)


def _post(server: str | None, path: str, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.post(path, json=payload)

    async def in_process():
        from .service.app import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://mdev.internal", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(in_process())


def _fail(message: str, code: int) -> int:
    print(message, file=sys.stderr)
    return code


def _handle(resp: httpx.Response) -> dict | int:
    """Parsed body on success, exit code on failure (diagnostic on stderr)."""
    if resp.status_code == 200:
        return resp.json()
    try:
        body = resp.json()
    except ValueError:
        body = {"detail": resp.text}
    detail = body.get("detail", body)
    if resp.status_code in (400, 422):
        return _fail(f"error: {json.dumps(detail) if not isinstance(detail, str) else detail}",
                     EXIT_USAGE)
    return _fail(f"error: {json.dumps(detail) if not isinstance(detail, str) else detail}",
                 EXIT_NUMERIC)


def _emit_json(data: dict) -> int:
    print(json.dumps(data, indent=2, sort_keys=True))
    return EXIT_OK


def _space_payload(args) -> dict:
    return {
        "kind": args.space_kind,
        "d": args.d,
        "q": args.space_q,
        "r": args.r,
        "D": args.D,
        "convention": args.convention,
    }


def _model_payload(args) -> dict:
    spec = {"variant": args.model}
    if args.model_args:
        try:
            extra = json.loads(args.model_args)
        except json.JSONDecodeError as exc:
            raise SystemExit(_fail(f"error: bad --model-args JSON: {exc}", EXIT_USAGE))
        if not isinstance(extra, dict):
            raise SystemExit(_fail("error: --model-args must be a JSON object", EXIT_USAGE))
        spec.update(extra)
    return spec


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def cmd_bound(args) -> int:
    selected = [s for s in BOUND_SELECTORS if getattr(args, s)]
    if len(selected) != 1:
        return _fail(
            f"error: select exactly one bound out of {', '.join('--' + s for s in BOUND_SELECTORS)}",
            EXIT_USAGE,
        )
    payload = {
        "selector": selected[0],
        "space": _space_payload(args),
        "n": args.n,
        "x": args.x,
        "x_abs": args.x_abs,
        "total_x": args.total_x,
        "t": args.t,
        "u": args.u,
        "q": args.q,
        "alpha": args.alpha,
        "C1": args.C1,
        "C2": args.C2,
        "p1": args.p1,
        "p2": args.p2,
        "p": args.p,
        "C": args.C,
        "sup_moment": args.sup_moment,
        "M": args.M,
        "b": args.b,
    }
    out = _handle(_post(args.server, "/bound", payload))
    return out if isinstance(out, int) else _emit_json(out)


def cmd_exact(args) -> int:
    out = _handle(_post(args.server, "/exact", {"n": args.n, "x": args.x}))
    return out if isinstance(out, int) else _emit_json(out)


def cmd_simulate(args) -> int:
    payload = {
        "model": _model_payload(args),
        "n": args.n,
        "x": args.x,
        "paths": args.paths,
        "seed": args.seed,
    }
    out = _handle(_post(args.server, "/simulate", payload))
    return out if isinstance(out, int) else _emit_json(out)


def cmd_rate(args) -> int:
    payload: dict = {"family": args.family, "alpha": args.alpha, "seed": args.seed}
    if args.csv:
        try:
            with open(args.csv, newline="") as fh:
                rows = list(csv.DictReader(fh))
            payload["points"] = [
                {"n": float(row["n"]), "p_hat": float(row["p_hat"])} for row in rows
            ]
        except (OSError, KeyError, ValueError) as exc:
            return _fail(f"error: bad rate CSV: {exc!r}", EXIT_USAGE)
    else:
        if not (args.model and args.n_grid and args.x is not None and args.paths):
            return _fail(
                "error: rate needs --csv or all of --model --n-grid --x --paths",
                EXIT_USAGE,
            )
        payload.update(
            model=_model_payload(args),
            n_grid=[int(v) for v in args.n_grid.split(",")],
            x=args.x,
            paths=args.paths,
        )
    out = _handle(_post(args.server, "/rate", payload))
    return out if isinstance(out, int) else _emit_json(out)


def cmd_optimize(args) -> int:
    if args.theorem1 == args.theorem2_q:
        return _fail("error: select exactly one of --theorem1, --theorem2-q", EXIT_USAGE)
    payload = {
        "kind": "theorem1" if args.theorem1 else "theorem2_q",
        "space": _space_payload(args),
        "n": args.n,
        "x": args.x,
        "alpha": args.alpha,
        "C1": args.C1,
        "C2": args.C2,
        "p1": args.p1,
        "p2": args.p2,
        "t_points": args.t_points,
        "u_points": args.u_points,
        "u_max": args.u_max,
        "q_lo": args.q_lo,
        "q_hi": args.q_hi,
        "trace": args.trace,
    }
    out = _handle(_post(args.server, "/optimize", payload))
    return out if isinstance(out, int) else _emit_json(out)


def cmd_verify(args) -> int:
    try:
        data = json.loads(Path(args.campaign).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"error: cannot read campaign: {exc}", EXIT_USAGE)
    out = _handle(_post(args.server, "/verify", data))
    if isinstance(out, int):
        return out
    destination = args.out or out.get("output_path")
    if destination:
        Path(destination).write_text(out["csv"])
    else:
        sys.stdout.write(out["csv"])
    return EXIT_OK if out["all_dominate"] else EXIT_FALSIFIED


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("mdev.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def _add_space_flags(p: argparse.ArgumentParser):
    p.add_argument("--space-kind", default="real",
                   choices=["real", "euclidean", "ell_q", "ell_r"])
    p.add_argument("--d", type=int, default=1, help="space dimension")
    p.add_argument("--space-q", type=float, default=None, help="norm exponent for ell_q/ell_r")
    p.add_argument("--r", type=float, default=2.0, help="smoothness order")
    p.add_argument("--D", type=float, default=1.0, help="smoothness constant")
    p.add_argument("--convention", default="paper_eq7",
                   choices=["paper_eq7", "pinelis_squared"])


def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(
        prog="mdev",
        description="Martingale deviation bounds: evaluate, simulate, verify, optimize.",
    )
    root.add_argument("--server", default=None,
                      help="base URL of a running service (default: in-process)")
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="evaluate one closed-form bound as JSON")
    for name in BOUND_SELECTORS:
        p.add_argument(f"--{name}", action="store_true")
    _add_space_flags(p)
    p.add_argument("--n", type=int)
    p.add_argument("--x", type=float)
    p.add_argument("--x-abs", dest="x_abs", type=float)
    p.add_argument("--total-x", dest="total_x", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--u", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--C1", type=float)
    p.add_argument("--C2", type=float)
    p.add_argument("--p1", type=float)
    p.add_argument("--p2", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--sup-moment", dest="sup_moment", type=float)
    p.add_argument("--M", type=float)
    p.add_argument("--b", type=float)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("exact", help="exact sign-walk deviation probability")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("simulate", help="Monte Carlo deviation probability")
    p.add_argument("--model", required=True)
    p.add_argument("--model-args", default=None, help="JSON object of model parameters")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--paths", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rate", help="fit a decay rate to estimates")
    p.add_argument("--family", required=True,
                   choices=["log_linear_in_n_alpha", "log_log"])
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--csv", default=None, help="CSV with n,p_hat columns")
    p.add_argument("--model", default=None)
    p.add_argument("--model-args", default=None)
    p.add_argument("--n-grid", dest="n_grid", default=None, help="comma-separated n values")
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--paths", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("optimize", help="sharpen a bound over its free parameters")
    p.add_argument("--theorem1", action="store_true")
    p.add_argument("--theorem2-q", dest="theorem2_q", action="store_true")
    _add_space_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--C1", type=float)
    p.add_argument("--C2", type=float)
    p.add_argument("--p1", type=float)
    p.add_argument("--p2", type=float)
    p.add_argument("--t-points", dest="t_points", type=int, default=24)
    p.add_argument("--u-points", dest="u_points", type=int, default=24)
    p.add_argument("--u-max", dest="u_max", type=float, default=None)
    p.add_argument("--q-lo", dest="q_lo", type=float)
    p.add_argument("--q-hi", dest="q_hi", type=float)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify", help="run a campaign file, emit CSV, exit 1 on falsification")
    p.add_argument("--campaign", required=True)
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return root


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except httpx.HTTPError as exc:
        return _fail(f"error: transport failure: {exc}", EXIT_NUMERIC)


if __name__ == "__main__":
    sys.exit(main())
