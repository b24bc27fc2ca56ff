"""Batch CLI: a thin client of the HTTP service.

Every subcommand builds a request and sends it through the service layer:
over the network when --server is given, through an in-process transport
otherwise (same endpoints, same schemas). Exit codes: 0 ok, 2 config
error, 3 numeric failure, 4 trend assertion failed (--assert).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from . import __version__

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_TREND = 4


class ServiceClient:
    """HTTP client bound to a remote server or to the in-process app."""

    def __init__(self, server: str | None):
        self._server = server
        if server is None:
            from .service.app import create_app
            self._app = create_app()

    def _request(self, method: str, path: str, **kw):
        if self._server:
            with httpx.Client(base_url=self._server, timeout=None) as client:
                return client.request(method, path, **kw)

        import asyncio

        async def go():
            transport = httpx.ASGITransport(app=self._app)
            async with httpx.AsyncClient(transport=transport, timeout=None,
                                         base_url="http://service.local") as client:
                return await client.request(method, path, **kw)

        return asyncio.run(go())

    def call(self, method: str, path: str, **kw):
        resp = self._request(method, path, **kw)
        if resp.status_code >= 400:
            try:
                body = resp.json()
            except Exception:
                body = {"detail": resp.text, "kind": "config"}
            kind = body.get("kind", "config")
            code = EXIT_NUMERIC if kind == "numeric" else EXIT_CONFIG
            click.echo(f"error ({kind}): {body.get('detail', 'request failed')}", err=True)
            sys.exit(code)
        return resp.json()


def _parse_json_opt(value: str | None, what: str):
    if value is None:
        return {}
    try:
        return json.loads(value)
    except json.JSONDecodeError as e:
        raise click.UsageError(f"invalid JSON for {what}: {e}")


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


@click.group()
@click.version_option(version=__version__)
@click.option("--server", default=None, metavar="URL",
              help="Base URL of a running service; default is in-process.")
@click.pass_context
def main(ctx, server):
    """Absorption-time laws, renewal approximations, Wasserstein diagnostics."""
    ctx.obj = {"server": server}


@main.command()
@click.pass_context
def models(ctx):
    """List the model registry with parameter schemas."""
    out = ServiceClient(ctx.obj["server"]).call("GET", "/models")
    for m in out["models"]:
        tag = "  [negative control]" if m.get("negative_control") else ""
        click.echo(f"{m['name']}{tag}")
        click.echo(f"  {m['description']}")
        if m["params"]:
            for k, v in m["params"].items():
                click.echo(f"    {k}: {v}")
        else:
            click.echo("    (no parameters)")


@main.command()
@click.option("--f", "f_path", required=True, type=click.Path(exists=True),
              help="JSON file with the first (discrete) law.")
@click.option("--g", "g_path", type=click.Path(exists=True),
              help="JSON file with the second discrete law.")
@click.option("--limit", type=click.Choice(["normal", "stable"]),
              help="Continuous limit law instead of a second discrete law.")
@click.option("--alpha", type=float, help="Stable index for --limit stable.")
@click.option("-p", "p", type=click.Choice(["1", "2"]), default="1")
@click.option("--shift", type=float, default=0.0, help="Affine centering of f.")
@click.option("--scale", type=float, default=1.0, help="Affine scaling of f.")
@click.pass_context
def dist(ctx, f_path, g_path, limit, alpha, p, shift, scale):
    """Minimal L^p distance between laws."""
    if (g_path is None) == (limit is None):
        raise click.UsageError("provide exactly one of --g or --limit")
    body = {"f": json.loads(Path(f_path).read_text()), "p": int(p)}
    if shift != 0.0 or scale != 1.0:
        body["affine"] = {"shift": shift, "scale": scale}
    if g_path:
        body["g"] = json.loads(Path(g_path).read_text())
    else:
        body["limit"] = {"kind": limit, "alpha": alpha}
    out = ServiceClient(ctx.obj["server"]).call("POST", "/dist", json=body)
    click.echo(json.dumps(out))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="JSON experiment config; flags below override its keys.")
@click.option("--model", default=None)
@click.option("--params", default=None, help="Model parameters as JSON.")
@click.option("--grid", default=None, help="Comma-separated strictly increasing n values.")
@click.option("--clause", type=click.Choice(["A", "B", "C"]), default=None)
@click.option("--method", type=click.Choice(["exact", "mc"]), default=None)
@click.option("--mc-samples", type=int, default=None)
@click.option("--seed", type=int, default=None, help="Mandatory in mc mode.")
@click.option("--prune-budget", type=float, default=None)
@click.option("--cache-dir", default=None)
@click.option("--use-cache/--no-cache", default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]), default="csv")
@click.option("--output", default=None, help="Write the table here instead of stdout.")
@click.option("--timings", is_flag=True, help="Include wall-clock runtimes in CSV "
                                              "(breaks byte-for-byte determinism).")
@click.option("--assert", "assert_trend", is_flag=True,
              help="Exit 4 unless the distance column decreases (trend verdict).")
@click.pass_context
def converge(ctx, config_path, model, params, grid, clause, method, mc_samples,
             seed, prune_budget, cache_dir, use_cache, fmt, output, timings,
             assert_trend):
    """Run a convergence experiment over a grid of start states."""
    cfg = {}
    if config_path:
        cfg = json.loads(Path(config_path).read_text())
    overrides = {
        "model": model, "clause": clause, "method": method,
        "mc_samples": mc_samples, "seed": seed, "prune_budget": prune_budget,
        "cache_dir": cache_dir, "use_cache": use_cache,
    }
    for k, v in overrides.items():
        if v is not None:
            cfg[k] = v
    if params is not None:
        cfg["params"] = _parse_json_opt(params, "--params")
    if grid is not None:
        try:
            cfg["grid"] = [int(x) for x in grid.split(",") if x.strip()]
        except ValueError:
            raise click.UsageError("--grid must be comma-separated integers")
    if "model" not in cfg or "grid" not in cfg:
        raise click.UsageError("a model and a grid are required (config file or flags)")
    out = ServiceClient(ctx.obj["server"]).call("POST", "/converge", json=cfg)
    from .experiment import ConvergenceResult, rows_to_csv, rows_to_jsonl
    result = ConvergenceResult(**out)
    if fmt == "csv":
        _emit(rows_to_csv(result.rows, timings=timings), output)
    else:
        _emit(rows_to_jsonl(result), output)
    s = result.summary
    click.echo(f"# trend: first={s.d_first:.6g} last={s.d_last:.6g} "
               f"decreasing={s.strictly_decreasing} halved={s.halved} "
               f"spearman={s.spearman:.3f} converged={s.converged}", err=True)
    if assert_trend and s.non_convergence_flag:
        click.echo("trend assertion failed: distances are not decreasing", err=True)
        sys.exit(EXIT_TREND)


@main.command()
@click.option("--target", type=click.Choice(["absorption", "mult_count"]),
              default="absorption")
@click.option("--model", required=True)
@click.option("--params", default=None, help="Model parameters as JSON.")
@click.option("--n", type=int, default=None, help="Start state (absorption).")
@click.option("--t", type=float, default=None, help="Time horizon (mult_count).")
@click.option("--samples", type=int, default=10000)
@click.option("--seed", type=int, required=True)
@click.option("--stationary", is_flag=True)
@click.option("--coupled", is_flag=True,
              help="Sample coupled (plain, stationary) pairs and report violations.")
@click.pass_context
def mc(ctx, target, model, params, n, t, samples, seed, stationary, coupled):
    """Monte Carlo summaries of absorption times or multiplicative counts."""
    body = {"target": target, "model": model,
            "params": _parse_json_opt(params, "--params"),
            "samples": samples, "seed": seed,
            "stationary": stationary, "coupled": coupled}
    if n is not None:
        body["n"] = n
    if t is not None:
        body["t"] = t
    out = ServiceClient(ctx.obj["server"]).call("POST", "/mc", json=body)
    click.echo(json.dumps(out))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="JSON bounds-problem description.")
@click.option("--model", default=None)
@click.option("--params", default=None)
@click.option("--n-max", type=int, default=None)
@click.option("--psi", type=click.Choice(["n", "1"]), default=None)
@click.pass_context
def bounds(ctx, config_path, model, params, n_max, psi):
    """Solve the linear recursion bound and report the boundedness verdict."""
    cfg = json.loads(Path(config_path).read_text()) if config_path else {}
    if model is not None:
        cfg["model"] = model
        cfg.setdefault("kind", "model")
    if params is not None:
        cfg["params"] = _parse_json_opt(params, "--params")
    if n_max is not None:
        cfg["n_max"] = n_max
    if psi is not None:
        cfg["psi"] = psi
    if not cfg:
        raise click.UsageError("provide --config or --model")
    out = ServiceClient(ctx.obj["server"]).call("POST", "/bounds", json=cfg)
    click.echo(json.dumps(out))


@main.group()
def cache():
    """Inspect or clean the on-disk law cache."""


@cache.command("list")
@click.option("--dir", "directory", default=None)
@click.pass_context
def cache_list(ctx, directory):
    params = {"dir": directory} if directory else None
    out = ServiceClient(ctx.parent.parent.obj["server"]).call("GET", "/cache", params=params)
    click.echo(json.dumps(out, indent=2))


@cache.command("clean")
@click.option("--dir", "directory", default=None)
@click.pass_context
def cache_clean(ctx, directory):
    params = {"dir": directory} if directory else None
    out = ServiceClient(ctx.parent.parent.obj["server"]).call("DELETE", "/cache", params=params)
    click.echo(json.dumps(out))


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8321)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app
    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
