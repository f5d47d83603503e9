"""The ``persona`` command line interface.

Exit codes: 0 success, 1 validation error, 2 I/O or provider error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import topics as topics_mod
from .ingest import parse_history, scan_documents
from .model import (
    GradeCoefficients,
    Profile,
    ProfileFormatError,
    load_profile,
    rotate_wob,
    save_profile,
)
from .pipeline import apply_documents, apply_visits, maybe_rotate
from .rerank import DEFAULT_BANK_SIZE, ProviderError, compare_rankings, fetch_results, rerank
from .service import ServiceConfig, provider_from_spec


class ValidationFailure(click.ClickException):
    exit_code = 1


class IoFailure(click.ClickException):
    exit_code = 2


def _load_or_new(path: str) -> Profile:
    p = Path(path)
    if not p.exists():
        return Profile()
    try:
        return load_profile(p)
    except ProfileFormatError as exc:
        raise IoFailure(f"cannot load profile {path}: {exc}")
    except OSError as exc:
        raise IoFailure(str(exc))


def _save(profile: Profile, path: str) -> None:
    try:
        save_profile(profile, path)
    except OSError as exc:
        raise IoFailure(str(exc))


@click.group()
@click.option(
    "--profile",
    "profile_path",
    envvar="PERSONA_PROFILE",
    default="profile.json",
    show_default=True,
    help="Path of the profile file.",
)
@click.pass_context
def main(ctx: click.Context, profile_path: str) -> None:
    """Personalized search re-ranking engine."""
    ctx.ensure_object(dict)
    ctx.obj["profile_path"] = profile_path


@main.group()
def ingest() -> None:
    """Ingest browsing history or local documents."""


@ingest.command("history")
@click.argument("history_file", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def ingest_history(ctx: click.Context, history_file: str) -> None:
    """Ingest a JSON-lines history export."""
    path = ctx.obj["profile_path"]
    profile = _load_or_new(path)
    try:
        with open(history_file, "r", encoding="utf-8") as fh:
            records, rejects = parse_history(fh)
    except OSError as exc:
        raise IoFailure(str(exc))
    apply_visits(profile, records)
    profile, rotated = maybe_rotate(profile)
    _save(profile, path)
    click.echo(f"accepted {len(records)} records, rejected {len(rejects)}")
    for reject in rejects:
        click.echo(f"  line {reject.line_number}: {reject.reason}", err=True)
    if rotated:
        click.echo("window of observation rotated")


@ingest.command("docs")
@click.argument("directory", type=click.Path(exists=True))
@click.option("--include", multiple=True, help="Glob of files to include.")
@click.option("--exclude", multiple=True, help="Glob of files to exclude.")
@click.pass_context
def ingest_docs(ctx: click.Context, directory: str, include: tuple, exclude: tuple) -> None:
    """Scan local documents into the offline profile."""
    path = ctx.obj["profile_path"]
    profile = _load_or_new(path)
    records, warnings = scan_documents([directory], list(include), list(exclude))
    apply_documents(profile, [r.extracted_text for r in records])
    _save(profile, path)
    click.echo(f"scanned {len(records)} documents, {len(warnings)} warnings")
    for w in warnings:
        click.echo(f"  {w.path}: {w.reason}", err=True)


@main.command()
@click.argument("query")
@click.option("--provider", "provider_spec", envvar="PERSONA_PROVIDER", required=True,
              help="Provider spec, e.g. fixture:results.json")
@click.option("--n", default=DEFAULT_BANK_SIZE, show_default=True)
@click.option("--explain", is_flag=True, help="Print the six signals per result.")
@click.pass_context
def search(ctx: click.Context, query: str, provider_spec: str, n: int, explain: bool) -> None:
    """Fetch, re-rank, and print results for QUERY."""
    if n < 1:
        raise ValidationFailure("--n must be positive")
    profile = _load_or_new(ctx.obj["profile_path"])
    try:
        provider = provider_from_spec(provider_spec)
        bank = fetch_results(query, provider, n)
    except (ValueError, OSError, ProviderError) as exc:
        raise IoFailure(str(exc))
    for i, (result, grade) in enumerate(rerank(bank, profile), start=1):
        click.echo(f"{i:3d}. [{grade.grade:.4f}] {result.title} — {result.url}")
        if explain:
            signals = " ".join(f"{k}={v:.4f}" for k, v in grade.signals().items())
            click.echo(f"      was #{result.web_rank}  {signals}")


@main.group()
def topics() -> None:
    """Inspect the topic graph."""


@topics.command("list")
@click.option("--edges", "show_edges", is_flag=True, help="Also dump the edge list.")
@click.pass_context
def topics_list(ctx: click.Context, show_edges: bool) -> None:
    """Print topics as (name, topic_value, cluster) descending by value."""
    profile = _load_or_new(ctx.obj["profile_path"])
    graph = profile.topic_graph
    cluster_index: dict[str, int] = {}
    for i, component in enumerate(topics_mod.clusters(graph)):
        for name in component:
            cluster_index[name] = i
    ordered = sorted(
        graph.nodes.values(), key=lambda node: (-topics_mod.topic_value(node), node.name)
    )
    for node in ordered:
        click.echo(
            f"{node.name}\t{topics_mod.topic_value(node):.4f}\t{cluster_index[node.name]}"
        )
    if show_edges:
        click.echo(topics_mod.export_edge_list(graph), nl=False)


@main.group()
def profile() -> None:
    """Inspect or maintain the profile."""


@profile.command("show")
@click.pass_context
def profile_show(ctx: click.Context) -> None:
    p = _load_or_new(ctx.obj["profile_path"])
    click.echo(f"visits: present={len(p.visits_present)} prev={len(p.visits_prev)} old={len(p.visits_old)}")
    click.echo(f"keywords: {len(p.keyword_db)}")
    click.echo(f"topics: {len(p.topic_graph.nodes)} (edges: {len(p.topic_graph.edges)})")
    click.echo(f"search patterns: {len(p.search_patterns)}")
    click.echo(f"offline terms: {len(p.offline_profile)}")
    c = p.coefficients
    click.echo(f"coefficients: a={c.a:g} b={c.b:g} c={c.c:g} d={c.d:g} e={c.e:g} f={c.f:g}")


@profile.command("rotate")
@click.pass_context
def profile_rotate(ctx: click.Context) -> None:
    """Force a window-of-observation rotation."""
    path = ctx.obj["profile_path"]
    p = rotate_wob(_load_or_new(path))
    _save(p, path)
    click.echo("rotated")


@profile.command("set-coefficients")
@click.argument("values", nargs=6, type=float)
@click.pass_context
def profile_set_coefficients(ctx: click.Context, values: tuple[float, ...]) -> None:
    """Set the six blend coefficients (must sum to 1)."""
    path = ctx.obj["profile_path"]
    p = _load_or_new(path)
    try:
        p.coefficients = GradeCoefficients(*values)
    except ValueError:
        raise ValidationFailure("coefficients must sum to 1")
    _save(p, path)
    click.echo("coefficients updated")


@main.group(name="eval")
def eval_group() -> None:
    """Evaluate re-ranking quality."""


@eval_group.command("compare")
@click.option("--bank", "bank_file", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Fixture provider file holding the bank.")
@click.option("--relevant", "relevant_file", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="File of relevant URLs, one per line.")
@click.option("--n", default=DEFAULT_BANK_SIZE, show_default=True)
@click.pass_context
def eval_compare(ctx: click.Context, bank_file: str, relevant_file: str, n: int) -> None:
    """Print the rank-shift CSV for a fixture bank against the profile."""
    profile = _load_or_new(ctx.obj["profile_path"])
    try:
        provider = provider_from_spec(f"fixture:{bank_file}")
        relevant = {
            line.strip()
            for line in Path(relevant_file).read_text(encoding="utf-8").splitlines()
            if line.strip()
        }
    except OSError as exc:
        raise IoFailure(str(exc))
    import json

    with open(bank_file, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    query = doc[0]["query"] if isinstance(doc, list) else doc["query"]
    bank = fetch_results(query, provider, n)
    ordered = rerank(bank, profile)
    report = compare_rankings(bank, ordered, relevant)
    click.echo(report.to_csv(), nl=False)
    if report.not_retrieved:
        click.echo("not retrieved: " + ", ".join(report.not_retrieved), err=True)
    click.echo(f"mean shift (relevant): {report.mean_shift:.2f}", err=True)


@main.command()
@click.option("--listen", envvar="PERSONA_LISTEN", default="127.0.0.1:8765", show_default=True)
@click.option("--provider", "provider_spec", envvar="PERSONA_PROVIDER", required=True)
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
              help="key=value config file (overridden by flags and env).")
@click.option("--cors-origin", "cors_origins", multiple=True)
@click.pass_context
def serve(ctx: click.Context, listen: str, provider_spec: str,
          config_file: str | None, cors_origins: tuple) -> None:
    """Run the HTTP API service."""
    from .service import load_config_file, run

    cfg = ServiceConfig(
        listen=listen,
        profile_path=ctx.obj["profile_path"],
        provider_spec=provider_spec,
        cors_allowed_origins=list(cors_origins),
    )
    if config_file:
        try:
            raw = load_config_file(config_file)
        except (OSError, ValueError) as exc:
            raise ValidationFailure(str(exc))
        cfg.listen = raw.get("listen", cfg.listen)
        cfg.profile_path = raw.get("profile", cfg.profile_path)
        cfg.provider_spec = raw.get("provider", cfg.provider_spec)
        if "cors_allowed_origins" in raw:
            cfg.cors_allowed_origins = [
                o.strip() for o in raw["cors_allowed_origins"].split(",") if o.strip()
            ]
    cfg = ServiceConfig.from_env(
        listen=cfg.listen,
        profile_path=cfg.profile_path,
        provider_spec=cfg.provider_spec,
        cors_allowed_origins=cfg.cors_allowed_origins,
    )
    run(cfg)


if __name__ == "__main__":
    sys.exit(main())
