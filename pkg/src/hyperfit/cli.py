"""Command line client for the fitting service.

Subcommands build a request model, run it against the in-process service
handlers (or POST it to a remote server given ``--server``), and render the
response as JSON or CSV.  Exit codes: 0 success, 2 usage error, 3 data or
input error, 4 numerical failure (no usable noise level).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import httpx

from .datafiles import load_basis, read_points
from .errors import HyperfitError, NoSolutionError
from .service import app as service_app
from .service import models

USAGE_EXIT = 2
DATA_EXIT = 3
NUMERICAL_EXIT = 4

_ENDPOINTS = {
    "fit": ("/fit", service_app.handle_fit, models.FitResponse),
    "invariance": ("/invariance", service_app.handle_invariance, models.InvarianceResponse),
    "sweep-n": ("/sweep/n", service_app.handle_sweep_n, models.SweepResponse),
    "sweep-sigma": ("/sweep/sigma", service_app.handle_sweep_sigma, models.SweepResponse),
    "moments": ("/moments", service_app.handle_moments, models.MomentsResponse),
    "psi": ("/psi", service_app.handle_psi, models.PsiResponse),
}


class _DataError(Exception):
    pass


class _NumericalError(Exception):
    pass


class _UsageError(Exception):
    pass


def _call(command: str, request, server: str | None):
    path, handler, resp_cls = _ENDPOINTS[command]
    if server is None:
        try:
            return handler(request)
        except NoSolutionError as exc:
            raise _NumericalError(str(exc)) from exc
        except (HyperfitError, ValueError, KeyError, OSError) as exc:
            raise _DataError(str(exc)) from exc
    url = server.rstrip("/") + path
    try:
        reply = httpx.post(url, json=request.model_dump(mode="json"), timeout=600.0)
    except httpx.HTTPError as exc:
        raise _DataError(f"cannot reach server {server!r}: {exc}") from exc
    if reply.status_code == 409:
        raise _NumericalError(_detail(reply))
    if reply.status_code != 200:
        raise _DataError(f"server returned {reply.status_code}: {_detail(reply)}")
    return resp_cls.model_validate(reply.json())


def _detail(reply) -> str:
    try:
        return str(reply.json().get("detail"))
    except Exception:
        return reply.text


def _write(output: str | None, text: str) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w") as fh:
            fh.write(text)


def _load_points(path: str) -> list[list[float]]:
    return [[float(x) for x in row] for row in read_points(path)]


def _basis_payload(spec: str) -> list[list[int]]:
    return [list(a) for a in load_basis(spec).columns]


def _parse_matrix(text: str, what: str) -> list[list[float]]:
    try:
        rows = [[float(x) for x in row.split(",")] for row in text.split(";")]
    except ValueError as exc:
        raise _DataError(f"malformed {what} {text!r}: {exc}") from exc
    return rows


def _sigma0_payload(text: str | None):
    if text is None or text == "identity":
        return None
    if text.startswith("diag:"):
        try:
            diag = [float(x) for x in text[len("diag:"):].split(",")]
        except ValueError as exc:
            raise _DataError(f"malformed sigma0 {text!r}: {exc}") from exc
        return [[d if i == j else 0.0 for j, d in enumerate(diag)] for i in range(len(diag))]
    return _parse_matrix(text, "sigma0")


def _resolve_seed(flag: int | None, config_seed) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("HYPERFIT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise _DataError(f"HYPERFIT_SEED must be an integer, got {env!r}") from exc
    if config_seed is not None:
        return int(config_seed)
    return 0


def _add_common(sub):
    sub.add_argument("--server", help="base URL of a running service; default runs in process")
    sub.add_argument("--output", help="write the result here instead of stdout")


def _add_fit_args(sub):
    sub.add_argument("--input", required=True, help="headerless CSV dataset, one point per row")
    sub.add_argument("--basis", required=True,
                     help="triangular:q:l | degree:q:l | box:g1,...,gq | JSON file")
    sub.add_argument("--method", choices=["ols", "als", "als-sigma"], default="als")
    sub.add_argument("--norm", choices=["bombieri", "euclidean"], default="bombieri")
    sub.add_argument("--sigma", type=float, help="noise scale (required for als-sigma)")
    sub.add_argument("--sigma0", help="noise covariance shape: identity | diag:a1,...,aq | rows a,b;c,d")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperfit",
        description="Fit algebraic hypersurfaces to noisy point clouds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit one dataset")
    _add_fit_args(p_fit)
    _add_common(p_fit)

    p_inv = sub.add_parser("invariance", help="compare a fit against a transformed refit")
    _add_fit_args(p_inv)
    group = p_inv.add_mutually_exclusive_group(required=True)
    group.add_argument("--rotate", type=float, help="rotation angle in radians (2-d data)")
    group.add_argument("--translate", help="offset h1,...,hq")
    group.add_argument("--scale", type=float, help="uniform scale factor")
    group.add_argument("--affine", help="matrix rows a,b;c,d")
    p_inv.add_argument("--offset", help="offset for --affine")
    p_inv.add_argument("--tol", type=float, default=1e-8)
    _add_common(p_inv)

    for name, helptext in (("sweep-n", "spread versus sample size"),
                           ("sweep-sigma", "relative spread versus noise scale")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="JSON sweep configuration")
        p.add_argument("--seed", type=int, help="master seed (overrides HYPERFIT_SEED and config)")
        _add_common(p)

    p_mom = sub.add_parser("moments", help="dump the moment array the fits consume")
    p_mom.add_argument("--input", required=True)
    p_mom.add_argument("--basis", required=True)
    p_mom.add_argument("--closure", action="store_true",
                       help="include the downward closure used by the corrected fits")
    _add_common(p_mom)

    p_psi = sub.add_parser("psi", help="dump Gram matrices as CSV")
    p_psi.add_argument("--input", required=True)
    p_psi.add_argument("--basis", required=True)
    p_psi.add_argument("--sigma", type=float, help="evaluate the corrected matrix at this scale")
    p_psi.add_argument("--sigma0", help="noise covariance shape")
    p_psi.add_argument("--coefficients", action="store_true",
                       help="dump every coefficient matrix in powers of sigma**2")
    _add_common(p_psi)
    return parser


def _cmd_fit(args) -> tuple[str, object]:
    req = models.FitRequest(
        points=_load_points(args.input),
        basis=_basis_payload(args.basis),
        method=args.method,
        norm=args.norm,
        sigma=args.sigma,
        sigma0=_sigma0_payload(args.sigma0),
    )
    return "fit", req


def _cmd_invariance(args) -> tuple[str, object]:
    if args.offset is not None and args.affine is None:
        raise _UsageError("--offset is only valid together with --affine")
    transform = models.TransformModel(
        rotate=args.rotate,
        translate=None if args.translate is None else
        [float(x) for x in args.translate.split(",")],
        scale=args.scale,
        matrix=None if args.affine is None else _parse_matrix(args.affine, "affine matrix"),
        offset=None if args.offset is None else [float(x) for x in args.offset.split(",")],
    )
    req = models.InvarianceRequest(
        points=_load_points(args.input),
        basis=_basis_payload(args.basis),
        method=args.method,
        norm=args.norm,
        sigma=args.sigma,
        sigma0=_sigma0_payload(args.sigma0),
        transform=transform,
        tol=args.tol,
    )
    return "invariance", req


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise _DataError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _DataError(f"malformed config {path!r}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise _DataError(f"config {path!r} must hold a JSON object")
    return cfg


def _sweep_request(args, cls):
    cfg = _load_config(args.config)
    cfg["seed"] = _resolve_seed(args.seed, cfg.get("seed"))
    if isinstance(cfg.get("basis"), str):
        cfg["basis"] = _basis_payload(cfg["basis"])
    return cls.model_validate(cfg)


def _cmd_sweep_n(args):
    return "sweep-n", _sweep_request(args, models.SweepNRequest)


def _cmd_sweep_sigma(args):
    return "sweep-sigma", _sweep_request(args, models.SweepSigmaRequest)


def _cmd_moments(args):
    req = models.MomentsRequest(
        points=_load_points(args.input),
        basis=_basis_payload(args.basis),
        closure=args.closure,
    )
    return "moments", req


def _cmd_psi(args):
    req = models.PsiRequest(
        points=_load_points(args.input),
        basis=_basis_payload(args.basis),
        sigma=args.sigma,
        sigma0=_sigma0_payload(args.sigma0),
        coefficients=args.coefficients,
    )
    return "psi", req


_BUILDERS = {
    "fit": _cmd_fit,
    "invariance": _cmd_invariance,
    "sweep-n": _cmd_sweep_n,
    "sweep-sigma": _cmd_sweep_sigma,
    "moments": _cmd_moments,
    "psi": _cmd_psi,
}


def _render(command: str, resp) -> str:
    if command in ("sweep-n", "sweep-sigma", "psi"):
        return resp.csv
    if command == "moments":
        return json.dumps(resp.model_dump()["moments"], indent=2) + "\n"
    return resp.model_dump_json(indent=2) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_EXIT
    try:
        if args.command in ("fit", "invariance") and args.method == "als-sigma" and args.sigma is None:
            raise _UsageError("method als-sigma needs --sigma")
        command, request = _BUILDERS[args.command](args)
        resp = _call(command, request, args.server)
    except _UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except _NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NUMERICAL_EXIT
    except _DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT
    except (HyperfitError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT
    _write(args.output, _render(command, resp))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
