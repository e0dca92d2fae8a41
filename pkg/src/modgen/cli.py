"""Command-line client.

The CLI is a thin HTTP client: by default it mounts the service in-process
(ASGI transport, no sockets), so `run`/`sweep`/`validate` work from a fresh
checkout; `--server URL` points it at a remote instance instead.  `serve`
starts the service itself.
"""

from __future__ import annotations

import argparse
import os
import sys

import httpx

from .errors import ModGenError
from .pipeline import ENV_CACHE_DIR, EMIT_CHOICES, parse_config, RunConfig, resolve


def _client(args) -> httpx.Client:
    if args.server:
        return httpx.Client(base_url=args.server, timeout=None)
    # in-process: mount the ASGI app behind a sync client (no sockets involved)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient
    from .service import create_app
    app = create_app(cache_dir=args.cache_dir or os.environ.get(ENV_CACHE_DIR))
    return TestClient(app, base_url="http://modgen.local")


def _add_common_run_flags(p):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--scenario", choices=["wedge2d", "cone2d", "cone4d"])
    p.add_argument("--n", type=int)
    p.add_argument("--b")
    p.add_argument("--mass")
    p.add_argument("--ell", type=int)
    p.add_argument("--digits", type=int)
    p.add_argument("--sigma")
    p.add_argument("--probes", help='"lo:hi:count" or comma-separated positions')
    p.add_argument("--quad-order", type=int, dest="quad_order")
    p.add_argument("--emit", default="report_csv",
                   help="comma list of: " + ",".join(EMIT_CHOICES))
    p.add_argument("--retry-precision", action="store_true")
    p.add_argument("--out", default=".", help="directory for emitted files")


def _add_connection_flags(p):
    p.add_argument("--server", help="base URL of a running service "
                                    "(default: in-process)")
    p.add_argument("--cache-dir", help=f"matrix cache directory "
                                       f"(default ${ENV_CACHE_DIR} or ~/.cache/modgen)")


def _request_payload(args) -> dict:
    base = None
    if args.config:
        with open(args.config) as fh:
            base = parse_config(fh.read())
    overrides = {}
    for key in ("scenario", "n", "b", "mass", "ell", "digits", "sigma",
                "probes", "quad_order"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    if base is None:
        if "scenario" not in overrides:
            raise SystemExit("error: --scenario or --config is required")
        cfg = resolve(RunConfig(**overrides))
    else:
        cfg = resolve(base if not overrides else
                      parse_config("".join(f"{k} = {v}\n" for k, v in overrides.items()),
                                   base=base))
    payload = {k: getattr(cfg, k) for k in
               ("scenario", "n", "b", "mass", "ell", "digits", "sigma",
                "probes", "quad_order")}
    payload["emit"] = [e for e in args.emit.split(",") if e]
    payload["retry_precision"] = args.retry_precision
    return payload


def _fail_on_http_error(resp: httpx.Response):
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        raise SystemExit(f"error ({resp.status_code}): {detail}")


def _write_artifacts(artifacts: dict, out_dir: str, prefix: str = ""):
    os.makedirs(out_dir, exist_ok=True)
    for name, text in artifacts.items():
        path = os.path.join(out_dir, prefix + name)
        with open(path, "w") as fh:
            fh.write(text)
        print(f"wrote {path}")


def _print_run(body: dict):
    cfg = body["config"]
    print(f"{cfg['scenario']} n={cfg['n']} b={cfg['b']} mass={cfg['mass']} "
          f"ell={cfg['ell']} digits={cfg['digits']} "
          f"[{'cache' if body['cache_hit'] else 'computed'} "
          f"{body['elapsed_seconds']:.1f}s]")
    d = body["diagnostics"]
    # decimal strings, not float(): margins at high digits underflow doubles
    from .precision import sci_str
    print(f"  spectral margin {sci_str(d['spectral_margin'])}  "
          f"inverse residual {sci_str(d['inverse_residual'])}")
    refs = list(body["rows"][0]["references"]) if body["rows"] else []
    header = "  mu         value" + "".join(f"      err_{k}" for k in refs)
    print(header)
    for row in body["rows"]:
        line = f"  {float(row['mu']):+7.3f} {float(row['value']):12.6f}"
        for k in refs:
            err = row["rel_errors"].get(k)
            line += f"  {float(err):10.2e}" if err is not None else "           -"
        print(line)


def cmd_run(args) -> int:
    payload = _request_payload(args)
    with _client(args) as client:
        resp = client.post("/runs", json=payload)
        _fail_on_http_error(resp)
        body = resp.json()
    _print_run(body)
    if body["artifacts"]:
        _write_artifacts(body["artifacts"], args.out)
    return 0


def cmd_sweep(args) -> int:
    payload = _request_payload(args)
    payload["masses"] = [m for m in args.masses.split(",") if m]
    if args.ells:
        payload["ells"] = [int(e) for e in args.ells.split(",")]
    with _client(args) as client:
        resp = client.post("/sweeps", json=payload)
        _fail_on_http_error(resp)
        body = resp.json()
    for run in body["runs"]:
        _print_run(run)
        if run["artifacts"]:
            cfg = run["config"]
            prefix = f"m{cfg['mass']}_ell{cfg['ell']}_"
            _write_artifacts(run["artifacts"], args.out, prefix=prefix)
    return 0


def cmd_validate(args) -> int:
    payload = {}
    if args.criteria:
        payload["criteria"] = [int(c) for c in args.criteria.split(",")]
    if args.cache_dir:
        payload["cache_dir"] = args.cache_dir
    with _client(args) as client:
        resp = client.post("/validate", json=payload)
        _fail_on_http_error(resp)
        body = resp.json()
    width = max(len(c["name"]) for c in body["criteria"])
    for c in body["criteria"]:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"[{status}] {c['number']:>2} {c['name']:<{width}} "
              f"({c['elapsed_seconds']:.1f}s)  {c['detail']}")
    print("result:", "PASS" if body["passed"] else "FAIL")
    return 0 if body["passed"] else 1


def cmd_serve(args) -> int:
    import uvicorn
    from .service import create_app
    app = create_app(cache_dir=args.cache_dir or os.environ.get(ENV_CACHE_DIR))
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modgen",
        description="Smeared modular-generator kernels for wedge and "
                    "double-cone regions of the free scalar field")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one scenario and print the report")
    _add_common_run_flags(p_run)
    _add_connection_flags(p_run)
    p_run.set_defaults(fn=cmd_run)

    p_sweep = sub.add_parser("sweep", help="cartesian product over masses (and ells)")
    _add_common_run_flags(p_sweep)
    _add_connection_flags(p_sweep)
    p_sweep.add_argument("--masses", required=True, help="comma list, e.g. 0.5,1,2")
    p_sweep.add_argument("--ells", help="comma list for cone4d, e.g. 0,1")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_val = sub.add_parser("validate", help="run the acceptance criteria")
    p_val.add_argument("--criteria", help="comma list of criterion numbers (default all)")
    _add_connection_flags(p_val)
    p_val.set_defaults(fn=cmd_validate)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8351)
    p_serve.add_argument("--cache-dir")
    p_serve.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ModGenError as exc:
        stage = getattr(exc, "stage", None)
        prefix = f"[{stage}] " if stage else ""
        raise SystemExit(f"error: {prefix}{exc}")


if __name__ == "__main__":
    sys.exit(main())
