"""Command line front end.

Subcommands mirror the pipeline stages: ``chunk`` inspects segmentation,
``index`` persists the chunk index plus vector store, ``retrieve`` answers a
single query, ``evaluate`` scores a query file, and ``sweep`` repeats an
evaluation across parent sizes.

Exit codes: 0 success, 2 configuration problems, 3 provider failures,
4 data problems (missing documents, malformed records, stale stores).
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from . import __version__
from .config import CHUNKERS, PipelineConfig, build_providers, config_echo, load_config
from .corpus import ingest_corpus
from .errors import ConfigError, LgmgcError, MalformedRecord, StaleVectorStore
from .evaluation import (
    EvalReport,
    evaluate_qa,
    evaluate_retrieval,
    load_answer_examples,
    load_retrieval_examples,
    mean_std,
    render_report,
)
from .granularity import canonical_json, index_file_hash, load_index, save_index
from .pipeline import build_pipeline_index, embed_index
from .retrieval import VectorStore, assemble_context, retrieve

__all__ = ["main"]


def pipeline_options(fn):
    """Flags shared by every subcommand; unset flags defer to the config file."""
    for option in reversed(
        [
            click.option(
                "--config",
                "config_path",
                type=click.Path(path_type=Path),
                default=None,
                help="TOML config file.",
            ),
            click.option("--jobs", type=int, default=None, help="Worker threads."),
            click.option(
                "--mock",
                is_flag=True,
                default=None,
                help="Use deterministic in-process providers (no network).",
            ),
            click.option("--theta", type=int, default=None, help="Parent size in words."),
            click.option("--k", type=int, default=None, help="Parents handed downstream."),
            click.option(
                "--chunker",
                type=click.Choice(CHUNKERS),
                default=None,
                help="Chunking strategy.",
            ),
        ]
    ):
        fn = option(fn)
    return fn


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except LgmgcError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.exit_code)

    return wrapper


def _load(config_path, **overrides) -> PipelineConfig:
    return load_config(config_path, **overrides)


def _resolve_path(flag_value, cfg_value, what: str) -> Path:
    """Command-line path, falling back to the config file."""
    if flag_value is not None:
        return Path(flag_value)
    if cfg_value:
        return Path(cfg_value)
    raise ConfigError(f"no {what} given: pass it on the command line or set it in the config")


@click.group()
@click.version_option(version=__version__, prog_name="lgmgc")
def main():
    """Chunk long documents, index them at several granularities, retrieve."""


@main.command()
@pipeline_options
@click.argument("corpus_path", required=False, type=click.Path(path_type=Path))
@click.option(
    "--out",
    type=click.Path(path_type=Path),
    default=None,
    help="Write the chunk index as JSON.",
)
@handle_errors
def chunk(config_path, jobs, mock, theta, k, chunker, corpus_path, out):
    """Chunk a corpus and print per-document statistics."""
    cfg = _load(config_path, jobs=jobs, mock=mock, theta=theta, k=k, chunker=chunker)
    corpus_path = _resolve_path(corpus_path, cfg.corpus_path, "corpus path")
    logits_provider = build_providers(cfg)[0] if cfg.logits_parents else None
    corpus = ingest_corpus(corpus_path)
    index = build_pipeline_index(corpus, cfg, logits_provider)
    by_doc: dict[str, list] = {doc_id: [] for doc_id in corpus}
    for parent in index.parents:
        by_doc[parent.doc_id].append(parent)
    click.echo(f"{'document':<24} {'parents':>7} {'mean_words':>10} {'max_words':>9}")
    for doc_id, parents in by_doc.items():
        sizes = [p.word_count for p in parents]
        mean = sum(sizes) / len(sizes) if sizes else 0.0
        peak = max(sizes) if sizes else 0
        click.echo(f"{doc_id:<24} {len(parents):>7} {mean:>10.1f} {peak:>9}")
    click.echo(
        f"total: {len(index.parents)} parents, {len(index.children)} children "
        f"({cfg.chunker}, theta={cfg.theta})"
    )
    if out is None and cfg.index_path:
        out = Path(cfg.index_path)
    if out is not None:
        digest = save_index(out, index, corpus, config_echo(cfg))
        click.echo(f"wrote {out} (sha256 {digest[:12]})")


@main.command("index")
@pipeline_options
@click.argument("corpus_path", required=False, type=click.Path(path_type=Path))
@click.option(
    "--out-index",
    type=click.Path(path_type=Path),
    default=None,
    help="Chunk index JSON path.",
)
@click.option(
    "--out-store",
    type=click.Path(path_type=Path),
    default=None,
    help="Vector store JSON path.",
)
@handle_errors
def index_cmd(config_path, jobs, mock, theta, k, chunker, corpus_path, out_index, out_store):
    """Chunk a corpus, embed every unit, and persist index plus store."""
    cfg = _load(config_path, jobs=jobs, mock=mock, theta=theta, k=k, chunker=chunker)
    corpus_path = _resolve_path(corpus_path, cfg.corpus_path, "corpus path")
    out_index = _resolve_path(out_index, cfg.index_path, "index output path (--out-index)")
    out_store = _resolve_path(out_store, cfg.store_path, "store output path (--out-store)")
    logits_provider, embedder, _ = build_providers(cfg)
    corpus = ingest_corpus(corpus_path)
    index = build_pipeline_index(corpus, cfg, logits_provider)
    save_index(out_index, index, corpus, config_echo(cfg))
    store = embed_index(index, corpus, embedder)
    store.save(out_store, index_hash=index_file_hash(out_index))
    click.echo(
        f"indexed {len(corpus.documents)} documents: "
        f"{len(index.parents)} parents, {len(index.children)} children, "
        f"{len(store)} vectors (dim {store.dimension})"
    )


def _load_artifacts(index_path: Path, store_path: Path):
    """Index + store, refusing a store built against different index bytes."""
    for path, what in ((index_path, "index"), (store_path, "vector store")):
        if not path.is_file():
            raise MalformedRecord(f"{what} file {path} does not exist; run `lgmgc index` first")
    corpus, index, saved_cfg = load_index(index_path)
    store, recorded_hash = VectorStore.load(store_path)
    current = index_file_hash(index_path)
    if recorded_hash != current:
        raise StaleVectorStore(
            f"{store_path} was built against index hash {recorded_hash[:12]}, "
            f"but {index_path} now hashes to {current[:12]}; re-run `lgmgc index`"
        )
    return corpus, index, saved_cfg, store


@main.command("retrieve")
@pipeline_options
@click.argument("query")
@click.option("--index", "index_path", type=click.Path(path_type=Path), default=None)
@click.option("--store", "store_path", type=click.Path(path_type=Path), default=None)
@click.option("--no-context", is_flag=True, help="Skip printing the assembled context.")
@handle_errors
def retrieve_cmd(config_path, jobs, mock, theta, k, chunker, query, index_path, store_path, no_context):
    """Print the top-k parent chunks for one query, then the context."""
    cfg = _load(config_path, jobs=jobs, mock=mock, theta=theta, k=k, chunker=chunker)
    index_path = _resolve_path(index_path, cfg.index_path, "index path (--index)")
    store_path = _resolve_path(store_path, cfg.store_path, "store path (--store)")
    _, embedder, _ = build_providers(cfg)
    corpus, index, _, store = _load_artifacts(index_path, store_path)
    ranking = retrieve(query, index, store, embedder, cfg.k)
    click.echo(f"{'rank':>4}  {'score':>8}  chunk")
    for position, sp in enumerate(ranking, start=1):
        click.echo(f"{position:>4}  {sp.score:>8.4f}  {sp.parent.chunk_id}")
    if not no_context:
        context = assemble_context(ranking, corpus, cfg.context_cap)
        click.echo("")
        click.echo(context.text)


@main.command()
@pipeline_options
@click.argument("queries_path", type=click.Path(exists=True, path_type=Path))
@click.option("--index", "index_path", type=click.Path(path_type=Path), default=None)
@click.option("--store", "store_path", type=click.Path(path_type=Path), default=None)
@click.option("--qa", is_flag=True, help="Generate answers and score token F1.")
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Report JSON path.")
@handle_errors
def evaluate(config_path, jobs, mock, theta, k, chunker, queries_path, index_path, store_path, qa, out):
    """Score a JSONL query file against an index and store."""
    cfg = _load(config_path, jobs=jobs, mock=mock, theta=theta, k=k, chunker=chunker)
    index_path = _resolve_path(index_path, cfg.index_path, "index path (--index)")
    store_path = _resolve_path(store_path, cfg.store_path, "store path (--store)")
    _, embedder, generator = build_providers(cfg)
    corpus, index, saved_cfg, store = _load_artifacts(index_path, store_path)
    # the index file knows how the artifact was built (chunker, theta, prompt);
    # only the scoring knobs come from this invocation
    echo = dict(saved_cfg)
    live = config_echo(cfg)
    for key in ("k", "k_list", "context_cap", "mock"):
        echo[key] = live[key]
    if qa:
        examples = load_answer_examples(queries_path)
        report = evaluate_qa(
            examples,
            index,
            store,
            embedder,
            generator,
            corpus,
            k=cfg.k,
            context_cap=cfg.context_cap,
            config=echo,
        )
    else:
        examples = load_retrieval_examples(queries_path)
        report = evaluate_retrieval(
            examples, index, store, embedder, corpus, k_list=cfg.k_list, config=echo
        )
    click.echo(render_report(report), nl=False)
    if out is None and cfg.report_path:
        out = Path(cfg.report_path)
    if out is not None:
        Path(out).write_text(report.to_json(), encoding="utf-8")
        click.echo(f"wrote {out}")


@main.command()
@pipeline_options
@click.argument("corpus_path", required=False, type=click.Path(path_type=Path))
@click.option(
    "--queries",
    "queries_path",
    type=click.Path(exists=True, path_type=Path),
    required=True,
    help="Retrieval queries JSONL.",
)
@click.option(
    "--thetas",
    default=None,
    help="Comma-separated parent sizes (default: config sweep_thetas).",
)
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Sweep JSON path.")
@handle_errors
def sweep(config_path, jobs, mock, theta, k, chunker, corpus_path, queries_path, thetas, out):
    """Evaluate one corpus at several parent sizes and aggregate."""
    cfg = _load(config_path, jobs=jobs, mock=mock, theta=theta, k=k, chunker=chunker)
    corpus_path = _resolve_path(corpus_path, cfg.corpus_path, "corpus path")
    if thetas is not None:
        try:
            sweep_thetas = tuple(int(t) for t in thetas.split(","))
        except ValueError as exc:
            raise ConfigError(f"--thetas must be comma-separated integers: {exc}") from exc
    else:
        sweep_thetas = cfg.sweep_thetas
    corpus = ingest_corpus(corpus_path)
    examples = load_retrieval_examples(queries_path)
    per_theta: dict[int, EvalReport] = {}
    for t in sweep_thetas:
        run_cfg = load_config(
            config_path, jobs=jobs, mock=mock, theta=t, k=k, chunker=chunker,
            context_cap=max(cfg.context_cap, t),
        )
        logits_provider, embedder, _ = build_providers(run_cfg)
        index = build_pipeline_index(corpus, run_cfg, logits_provider)
        store = embed_index(index, corpus, embedder)
        per_theta[t] = evaluate_retrieval(
            examples, index, store, embedder, corpus,
            k_list=run_cfg.k_list, config=config_echo(run_cfg),
        )
    header = f"{'theta':>6}"
    for kk in cfg.k_list:
        header += f"  {'DCG@' + str(kk):>8}  {'R@' + str(kk):>8}"
    click.echo(header)
    for t in sweep_thetas:
        row = f"{t:>6}"
        for kk in cfg.k_list:
            row += f"  {per_theta[t].dcg_at[kk]:>8.2f}  {per_theta[t].recall_at[kk]:>8.2f}"
        click.echo(row)
    aggregate: dict[str, dict[str, dict[str, float]]] = {"dcg_at": {}, "recall_at": {}}
    for kk in cfg.k_list:
        for name in ("dcg_at", "recall_at"):
            values = [getattr(per_theta[t], name)[kk] for t in sweep_thetas]
            m, s = mean_std(values)
            aggregate[name][str(kk)] = {"mean": m, "std": s}
    for label, stat in (("mean", "mean"), ("std", "std")):
        line = f"{label:>6}"
        for kk in cfg.k_list:
            line += (
                f"  {aggregate['dcg_at'][str(kk)][stat]:>8.2f}"
                f"  {aggregate['recall_at'][str(kk)][stat]:>8.2f}"
            )
        click.echo(line)
    if out is None and cfg.report_path:
        out = Path(cfg.report_path)
    if out is not None:
        payload = {
            "thetas": list(sweep_thetas),
            "per_theta": {
                str(t): {
                    "dcg_at": {str(kk): v for kk, v in per_theta[t].dcg_at.items()},
                    "recall_at": {str(kk): v for kk, v in per_theta[t].recall_at.items()},
                }
                for t in sweep_thetas
            },
            "aggregate": aggregate,
        }
        Path(out).write_text(canonical_json(payload), encoding="utf-8")
        click.echo(f"wrote {out}")


if __name__ == "__main__":
    main()
