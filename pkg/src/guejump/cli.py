"""Command-line frontend: a thin client of the HTTP service.

Each subcommand builds a request, executes it against the in-process app
(or a remote server via --server), and writes the returned table to CSV or
JSON.  Flag values override config-file entries, which override built-in
defaults; the effective config is echoed into every output file as
'#'-prefixed header lines.  Outputs are written atomically.

Exit codes: 0 success, 1 numerical failure (with a JSON error record on
stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .io_utils import atomic_write_text, render_csv, render_json

_OUTPUT_DIR_ENV = "GUEJUMP_OUTPUT_DIR"

# subcommand -> (endpoint, [(flag, payload_key, type, default, help)])
# default None means required unless supplied via --config.
_FLOAT, _INT, _STR = float, int, str

_COMMANDS: dict[str, tuple[str, list]] = {
    "recurrence": ("/recurrence", [
        ("--s1", "s1", _FLOAT, None, "lower jump location"),
        ("--s2", "s2", _FLOAT, None, "upper jump location"),
        ("--w1", "omega1", _FLOAT, None, "jump height on (s1, s2)"),
        ("--w2", "omega2", _FLOAT, None, "jump height on (s2, inf)"),
        ("--n", "n", _INT, None, "number of degrees"),
        ("--nodes-per-panel", "nodes_per_panel", _INT, 40, "quadrature nodes per panel"),
    ]),
    "hankel": ("/hankel", [
        ("--s1", "s1", _FLOAT, None, "lower jump location"),
        ("--s2", "s2", _FLOAT, None, "upper jump location"),
        ("--w1", "omega1", _FLOAT, None, "jump height on (s1, s2)"),
        ("--w2", "omega2", _FLOAT, None, "jump height on (s2, inf)"),
        ("--n", "n", _INT, None, "largest determinant order"),
    ]),
    "verify-thm1": ("/verify-thm1", [
        ("--s1", "s1", _FLOAT, None, "lower jump location"),
        ("--s2", "s2", _FLOAT, None, "upper jump location"),
        ("--w1", "omega1", _FLOAT, None, "jump height on (s1, s2)"),
        ("--w2", "omega2", _FLOAT, None, "jump height on (s2, inf)"),
        ("--n", "n", _INT, None, "polynomial degree"),
        ("--h", "h", _FLOAT, 1e-3, "finite-difference step"),
    ]),
    "cpiv-residuals": ("/cpiv-residuals", [
        ("--s1", "s1", _FLOAT, None, "lower jump location"),
        ("--s2", "s2", _FLOAT, None, "upper jump location"),
        ("--w1", "omega1", _FLOAT, None, "jump height on (s1, s2)"),
        ("--w2", "omega2", _FLOAT, None, "jump height on (s2, inf)"),
        ("--n", "n", _INT, None, "polynomial degree"),
        ("--h", "h", _FLOAT, 1e-3, "finite-difference step"),
    ]),
    "cpiv-scaling": ("/cpiv-scaling", [
        ("--n", "n", _INT, None, "matrix size"),
        ("--t1", "t1", _FLOAT, None, "edge coordinate of s1"),
        ("--t2", "t2", _FLOAT, None, "edge coordinate of s2"),
        ("--w1", "omega1", _FLOAT, None, "jump height on (s1, s2)"),
        ("--w2", "omega2", _FLOAT, None, "jump height on (s2, inf)"),
    ]),
    "cpii-solve": ("/cpii-solve", [
        ("--w1", "omega1", _FLOAT, None, "jump height on (s1, s2)"),
        ("--w2", "omega2", _FLOAT, None, "jump height on (s2, inf)"),
        ("--s", "s", _FLOAT, None, "channel separation t2 - t1"),
        ("--x-min", "x_min", _FLOAT, None, "left end of the solve"),
        ("--x-max", "x_max", _FLOAT, 12.0, "tail anchor"),
        ("--tol", "tol", _FLOAT, 1e-11, "solver tolerance"),
        ("--grid-step", "grid_step", _FLOAT, 0.02, "output grid step"),
    ]),
    "gap-limit": ("/gap-limit", [
        ("--t1", "t1", _FLOAT, None, "left edge coordinate"),
        ("--t2", "t2", _FLOAT, None, "right edge coordinate"),
        ("--tol", "tol", _FLOAT, 1e-11, "solver tolerance"),
        ("--oracle", "oracle", _STR, "fredholm", "cross-check oracle (fredholm|none)"),
        ("--m-nodes", "m_nodes", _INT, 80, "oracle quadrature nodes"),
    ]),
    "conditional-limit": ("/conditional-limit", [
        ("--t1", "t1", _FLOAT, None, "conditioning edge coordinate"),
        ("--t2", "t2", _FLOAT, None, "target edge coordinate"),
        ("--p", "p", _FLOAT, None, "thinning (removal) probability"),
        ("--tol", "tol", _FLOAT, 1e-11, "solver tolerance"),
        ("--oracle", "oracle", _STR, "fredholm", "cross-check oracle (fredholm|none)"),
        ("--m-nodes", "m_nodes", _INT, 80, "oracle quadrature nodes"),
    ]),
    "tw": ("/tw", [
        ("--t-min", "t_min", _FLOAT, -5.0, "grid start"),
        ("--t-max", "t_max", _FLOAT, 2.0, "grid end"),
        ("--points", "points", _INT, 36, "grid size"),
        ("--tol", "tol", _FLOAT, 1e-11, "solver tolerance"),
        ("--oracle", "oracle", _STR, "none", "also emit oracle rows (fredholm|none)"),
        ("--m-nodes", "m_nodes", _INT, 80, "oracle quadrature nodes"),
    ]),
    "hankel-asymptotics": ("/hankel-asymptotics", [
        ("--n", "n", _INT, None, "matrix size"),
        ("--t1", "t1", _FLOAT, None, "edge coordinate of s1"),
        ("--t2", "t2", _FLOAT, None, "edge coordinate of s2"),
        ("--w1", "omega1", _FLOAT, None, "jump height on (s1, s2)"),
        ("--w2", "omega2", _FLOAT, None, "jump height on (s2, inf)"),
    ]),
    "op-asymptotics": ("/op-asymptotics", [
        ("--n", "n", _INT, None, "matrix size"),
        ("--t1", "t1", _FLOAT, None, "edge coordinate of s1"),
        ("--t2", "t2", _FLOAT, None, "edge coordinate of s2"),
        ("--w1", "omega1", _FLOAT, None, "jump height on (s1, s2)"),
        ("--w2", "omega2", _FLOAT, None, "jump height on (s2, inf)"),
    ]),
    "mc-gap": ("/mc-gap", [
        ("--n", "n", _INT, None, "matrix size"),
        ("--s1", "s1", _FLOAT, None, "interval start"),
        ("--s2", "s2", _FLOAT, None, "interval end"),
        ("--samples", "n_samples", _INT, None, "Monte-Carlo samples"),
        ("--seed", "seed", _INT, 0, "RNG seed"),
        ("--streams", "n_streams", _INT, 1, "independent RNG streams"),
    ]),
    "mc-conditional": ("/mc-conditional", [
        ("--n", "n", _INT, None, "matrix size"),
        ("--x", "x", _FLOAT, None, "target threshold for the largest eigenvalue"),
        ("--y", "y", _FLOAT, None, "conditioning threshold for the thinned maximum"),
        ("--p", "p", _FLOAT, None, "thinning (removal) probability"),
        ("--samples", "n_samples", _INT, None, "Monte-Carlo samples"),
        ("--seed", "seed", _INT, 0, "RNG seed"),
        ("--streams", "n_streams", _INT, 1, "independent RNG streams"),
    ]),
    "fredholm-oracle": ("/fredholm-oracle", [
        ("--t1", "t1", _FLOAT, None, "left edge coordinate"),
        ("--t2", "t2", _FLOAT, None, "right edge coordinate"),
        ("--w1", "omega1", _FLOAT, 0.0, "symbol parameter on (t1, t2)"),
        ("--w2", "omega2", _FLOAT, 1.0, "symbol parameter on (t2, inf)"),
        ("--m-nodes", "m_nodes", _INT, 80, "quadrature nodes per segment"),
    ]),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="guejump",
        description="Orthogonal polynomials, Hankel determinants and edge "
                    "limit laws for the Gaussian weight with two jumps")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, flags) in _COMMANDS.items():
        p = sub.add_parser(name)
        for flag, key, typ, default, help_text in flags:
            p.add_argument(flag, dest=key, type=typ, default=None,
                           help=help_text + ("" if default is None
                                             else f" (default {default})"))
        p.add_argument("--config", type=str, default=None,
                       help="JSON file with parameter defaults")
        p.add_argument("--out", type=str, default=None,
                       help="output path (stdout if omitted)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--server", type=str, default=None,
                       help="base URL of a running service "
                            "(default: run in-process)")
    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", type=str, default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _effective_payload(name: str, args: argparse.Namespace) -> dict:
    _, flags = _COMMANDS[name]
    config = {}
    if args.config:
        with open(args.config) as fh:
            config = json.load(fh)
    payload = {}
    missing = []
    for flag, key, typ, default, _ in flags:
        value = getattr(args, key)
        if value is None:
            value = config.get(key, default)
        if value is None:
            missing.append(flag)
        else:
            payload[key] = typ(value)
    if missing:
        raise SystemExit(
            f"guejump {name}: missing required parameters: {', '.join(missing)}")
    return payload


def _execute(endpoint: str, payload: dict, server: str | None) -> dict:
    if server:
        import httpx
        resp = httpx.post(server.rstrip("/") + endpoint, json=payload,
                          timeout=None)
    else:
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            from fastapi.testclient import TestClient
        from .service import app
        with TestClient(app) as client:
            resp = client.post(endpoint, json=payload)
    body = resp.json()
    if resp.status_code != 200:
        raise _ServiceError(body)
    return body


class _ServiceError(Exception):
    def __init__(self, record):
        super().__init__(json.dumps(record))
        self.record = record


def _write_output(body: dict, args: argparse.Namespace) -> None:
    renderer = render_csv if args.format == "csv" else render_json
    text = renderer(body["meta"], body["columns"], body["rows"])
    out = args.out
    if out is None:
        sys.stdout.write(text)
        return
    if not os.path.isabs(out):
        out = os.path.join(os.environ.get(_OUTPUT_DIR_ENV, "."), out)
    atomic_write_text(out, text)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        import uvicorn
        from .service import app
        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    endpoint, _ = _COMMANDS[args.command]
    try:
        payload = _effective_payload(args.command, args)
    except SystemExit as exc:
        print(exc, file=sys.stderr)
        return 2
    try:
        body = _execute(endpoint, payload, args.server)
    except _ServiceError as exc:
        print(json.dumps(exc.record), file=sys.stderr)
        return 1
    _write_output(body, args)
    meta = body["meta"]
    if "ok" in meta and not meta["ok"]:
        return 1
    return 0


# alias matching the documented operation name
run = main


if __name__ == "__main__":
    sys.exit(main())
