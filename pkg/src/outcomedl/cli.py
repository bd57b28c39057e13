"""Command line front end: a thin client of the HTTP service.

By default every command talks to the service in-process over an ASGI
transport, so no server needs to run; `--server URL` points the same
commands at a remote instance.  Exit codes are stable: 0 success / checks
pass, 1 check or diff failure, 2 usage or parse error.  JSON output goes to
stdout with no log noise; diagnostics go to stderr.
"""

from __future__ import annotations

import asyncio
import json
import sys
from typing import Optional

import click
import httpx


def _client(server: Optional[str]) -> httpx.AsyncClient:
    if server:
        return httpx.AsyncClient(base_url=server, timeout=600.0)
    from .service import app

    return httpx.AsyncClient(
        transport=httpx.ASGITransport(app=app), base_url="http://service", timeout=None
    )


async def _apost(server: Optional[str], path: str, payload: dict) -> httpx.Response:
    async with _client(server) as client:
        return await client.post(path, json=payload)


def _post(ctx: click.Context, path: str, payload: dict) -> dict:
    resp = asyncio.run(_apost(ctx.obj.get("server"), path, payload))
    if resp.status_code == 422:
        detail = resp.json().get("detail", [])
        if isinstance(detail, list):
            for entry in detail:
                if isinstance(entry, dict) and "line" in entry:
                    click.echo(
                        f"{entry['line']}:{entry['column']}: {entry['message']}\n"
                        f"    {entry['snippet']}",
                        err=True,
                    )
                else:
                    click.echo(str(entry), err=True)
        else:
            click.echo(str(detail), err=True)
        sys.exit(2)
    resp.raise_for_status()
    return resp.json()


def _read_source(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        click.echo(f"cannot read {path}: {exc}", err=True)
        sys.exit(2)


@click.group()
@click.option("--server", default=None, metavar="URL", help="Remote service URL (default: in-process).")
@click.pass_context
def main(ctx: click.Context, server: Optional[str]) -> None:
    """Reason about theories of facts, rules with preference chains, and rule priorities."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command()
@click.argument("file", type=click.Path())
@click.option("--engine", type=click.Choice(["linear", "reference"]), default="linear")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text")
@click.option("--modes", default=None, help="Comma-separated mode filter (B,O,D,G,I,SI).")
@click.pass_context
def compute(ctx: click.Context, file: str, engine: str, fmt: str, modes: Optional[str]) -> None:
    """Compute the extension of a theory file."""
    payload = {"source": _read_source(file), "engine": engine}
    if modes:
        payload["modes"] = [m.strip() for m in modes.split(",") if m.strip()]
    data = _post(ctx, "/compute", payload)
    for w in data.get("warnings", []):
        click.echo(f"warning: {w}", err=True)
    if fmt == "json":
        click.echo(json.dumps({"modes": data["modes"]}, indent=2, sort_keys=True))
        return
    for mode, part in data["modes"].items():
        click.echo(f"[{mode}]")
        for key in ("plus", "minus", "undecided"):
            vals = ", ".join(part[key]) or "-"
            click.echo(f"  {key:<10} {vals}")


@main.command()
@click.argument("file", type=click.Path())
@click.pass_context
def check(ctx: click.Context, file: str) -> None:
    """Check a theory for complementary facts and priority cycles."""
    data = _post(ctx, "/check", {"source": _read_source(file)})
    if data["consistent"]:
        click.echo("consistent")
        return
    for v in data["violations"]:
        click.echo(v)
    sys.exit(1)


@main.command()
@click.argument("file", type=click.Path())
@click.pass_context
def diff(ctx: click.Context, file: str) -> None:
    """Run both engines and compare their extensions."""
    data = _post(ctx, "/diff", {"source": _read_source(file)})
    if data["equivalent"]:
        click.echo("equivalent")
        return
    click.echo(json.dumps(data["differences"], indent=2, sort_keys=True))
    sys.exit(1)


@main.command()
@click.option("--sizes", default="1000,10000,100000", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--engine", type=click.Choice(["linear", "reference"]), default="linear")
@click.option("--repeats", default=5, show_default=True)
@click.pass_context
def bench(ctx: click.Context, sizes: str, seed: int, engine: str, repeats: int) -> None:
    """Time the engine on a chain-stress family and fit the log-log slope."""
    try:
        size_list = [int(s) for s in sizes.split(",") if s.strip()]
    except ValueError:
        click.echo(f"bad --sizes value: {sizes!r}", err=True)
        sys.exit(2)
    data = _post(
        ctx, "/bench", {"sizes": size_list, "seed": seed, "engine": engine, "repeats": repeats}
    )
    click.echo(json.dumps(data, indent=2, sort_keys=True))
    if not data["within_bound"]:
        sys.exit(1)


@main.command()
@click.option("--size", required=True, type=int)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Write here instead of stdout.")
@click.pass_context
def gen(ctx: click.Context, size: int, seed: int, out: Optional[str]) -> None:
    """Generate a deterministic consistent theory of roughly the given size."""
    if size <= 0:
        click.echo("--size must be positive", err=True)
        sys.exit(2)
    data = _post(ctx, "/generate", {"size": size, "seed": seed})
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(data["source"])
        click.echo(f"wrote {out} (size {data['size']})", err=True)
    else:
        click.echo(data["source"], nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("outcomedl.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
