"""Experiment driver: run searches, start workers, inspect cost, re-export fronts."""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import densenet
from .config import ConfigError, ExperimentConfig, load_config
from .encoding import DecodedGenotype, SearchSpace, clamp, decode
from .errors import SwarmNasError
from .evaluation import SurrogateEvaluator, load_cache, save_cache
from .search import MultiObjectiveSwarmSearch
from .worker import NetworkWorkerClient, WorkerServer

HISTORY_HEADER = "generation\taccuracy\tnegFlops\tgenotype"


def _genotype_text(genotype, space: SearchSpace | None, architecture: bool) -> str:
    if genotype is None:
        return ""
    if architecture and space is not None:
        decoded = decode(clamp(np.asarray(genotype), space), space)
        return ",".join(str(v) for v in decoded.key)
    return ",".join(repr(float(v)) for v in np.asarray(genotype, dtype=float))


def export_history(history, path, space: SearchSpace | None = None, architecture: bool = True) -> None:
    """Write one row per archive member per generation; floats round-trip via repr."""
    lines = [HISTORY_HEADER]
    for generation, snapshot in enumerate(history, start=1):
        for genotype, objectives in snapshot:
            accuracy, neg_flops = objectives[0], objectives[1]
            lines.append(
                f"{generation}\t{accuracy!r}\t{neg_flops!r}\t{_genotype_text(genotype, space, architecture)}"
            )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_history(path) -> list[tuple[int, float, float, str]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != HISTORY_HEADER:
            raise SwarmNasError(f"unrecognized history header in {path}: {header!r}")
        for line in fh:
            generation, accuracy, neg_flops, genotype = line.rstrip("\n").split("\t")
            rows.append((int(generation), float(accuracy), float(neg_flops), genotype))
    return rows


def run_experiment(config: ExperimentConfig) -> MultiObjectiveSwarmSearch:
    cache = load_cache(config.cache_path) if config.cache_path else None
    if config.evaluator == "surrogate":
        evaluator = SurrogateEvaluator(
            base=config.surrogate_base,
            gain=config.surrogate_gain,
            penalty=config.surrogate_penalty,
            flops_half=config.surrogate_flops_half,
        )
    else:
        evaluator = config.evaluator
    workers = None
    if config.evaluator == "remote":
        workers = [_worker_client(address) for address in config.workers]
    search = MultiObjectiveSwarmSearch(
        population=config.population,
        generations=config.generations,
        evaluator=evaluator,
        seed=config.seed,
        space=config.space,
        epsilon=config.epsilon,
        flops_scale=config.flops_scale,
        zdt_dimensions=config.zdt_dimensions,
        workers=workers,
        cache=cache,
    )
    search.fit()
    if config.cache_path:
        save_cache(search.cache_, config.cache_path)
    if config.history_path:
        export_history(
            search.history_,
            config.history_path,
            space=search.space_,
            architecture=search.is_architecture_search_,
        )
    return search


def _worker_client(address: str) -> NetworkWorkerClient:
    host, _, port = address.rpartition(":")
    return NetworkWorkerClient(host or "127.0.0.1", int(port))


def _print_archive(search: MultiObjectiveSwarmSearch, flops_scale: float) -> None:
    click.echo("accuracy\tflops\tgenotype")
    rows = []
    for genotype, objectives in search.archive_.entries:
        text = _genotype_text(genotype, search.space_, search.is_architecture_search_)
        rows.append((objectives[0], -objectives[1] * flops_scale, text))
    for accuracy, flops_value, text in sorted(rows, key=lambda r: r[1]):
        click.echo(f"{accuracy:.4f}\t{flops_value:.0f}\t{text}")


@click.group()
def main():
    """Multi-objective swarm search over dense-block CNN genotypes."""


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
def search(config_path):
    """Run the experiment described by a config file."""
    try:
        config = load_config(config_path)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(2) from None
    try:
        estimator = run_experiment(config)
    except SwarmNasError as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1) from None
    _print_archive(estimator, config.flops_scale)


@main.command()
@click.option("--bind", default="127.0.0.1:0", help="host:port to listen on")
@click.option("--evaluator", "evaluator_name", default="surrogate", type=click.Choice(["surrogate"]))
@click.option("--delay", default=0.0, type=float, help="artificial per-job delay (tests)")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True, dir_okay=False),
              help="config file providing surrogate constants")
def worker(bind, evaluator_name, delay, config_path):
    """Start a single-slot evaluation worker."""
    base = SurrogateEvaluator()
    if config_path:
        cfg = load_config(config_path)
        base = SurrogateEvaluator(
            base=cfg.surrogate_base,
            gain=cfg.surrogate_gain,
            penalty=cfg.surrogate_penalty,
            flops_half=cfg.surrogate_flops_half,
        )
    host, _, port = bind.rpartition(":")
    server = WorkerServer(host or "127.0.0.1", int(port), evaluator=base, delay=delay)
    click.echo(f"listening on {server.address[0]}:{server.address[1]}", err=True)
    sys.stderr.flush()
    server.serve_forever()


@main.command()
@click.argument("genotype")
@click.option("--input", "geometry", default="32x32x3", help="input as HxWxC")
@click.option("--classes", default=10, type=int)
def flops(genotype, geometry, classes):
    """Print the FLOPs breakdown for a decoded genotype (layers,growth per block)."""
    try:
        key = [int(v) for v in genotype.split(",")]
        decoded = DecodedGenotype.from_key(key)
        h, w, c = (int(v) for v in geometry.split("x"))
        space = SearchSpace(
            layer_ranges=tuple((n, n) for n, _ in decoded.per_block),
            growth_ranges=tuple((k, k) for _, k in decoded.per_block),
            input_height=h,
            input_width=w,
            input_channels=c,
            num_classes=classes,
        )
        breakdown = densenet.flops(densenet.expand(decoded, space))
    except (ValueError, SwarmNasError) as exc:
        raise SystemExit(f"error: {exc}") from None
    click.echo(json.dumps(breakdown.to_dict(), indent=2))


@main.command()
@click.argument("history_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", default=None, type=click.Path(dir_okay=False), help="write instead of printing")
def front(history_path, out):
    """Re-export the final generation's front from a history file."""
    rows = parse_history(history_path)
    if not rows:
        raise SystemExit("error: history file has no rows")
    last = max(r[0] for r in rows)
    lines = [HISTORY_HEADER]
    for generation, accuracy, neg_flops, genotype in rows:
        if generation == last:
            lines.append(f"{generation}\t{accuracy!r}\t{neg_flops!r}\t{genotype}")
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()
