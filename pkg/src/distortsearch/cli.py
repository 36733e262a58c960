"""Command-line interface.

Subcommands: generate, search, mine, attack, session, run, report, serve.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from random import Random

from . import datapaths
from .attack import cross_validate, ingest_query_log, merge_datasets
from .experiment import ExperimentConfig, run_experiment
from .lexicon import load_lexicon
from .obfuscate import (
    DEFAULT_PATTERN_SET,
    generate_batch,
    parse_pattern_set,
    read_batch,
    write_batch,
)
from .report import emit_report, load_report
from .searchsim import SearchIndex, load_ads, load_corpus
from .session import ClickPolicy, run_session
from .textmine import build_matrix, load_stopwords, normalize_tokens, relevance_count

logger = logging.getLogger(__name__)


def _add_data_args(parser: argparse.ArgumentParser, *names: str) -> None:
    defaults = {
        "corpus": datapaths.corpus_path,
        "ads": datapaths.ads_path,
        "lexicon": datapaths.lexicon_path,
        "stopwords": datapaths.stopwords_path,
        "real-log": datapaths.real_queries_path,
    }
    for name in names:
        parser.add_argument(
            f"--{name}", type=Path, default=None, help=f"{name} file (default: bundled)"
        )


def _resolve(value: Path | None, default_fn) -> Path:
    return value if value is not None else default_fn()


def _emit(payload: dict, out: Path | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _cmd_generate(args: argparse.Namespace) -> int:
    lexicon = load_lexicon(_resolve(args.lexicon, datapaths.lexicon_path))
    patterns = parse_pattern_set(args.patterns)
    batch = generate_batch(
        args.intent,
        lexicon,
        seed=args.seed,
        patterns=patterns,
        per_pattern=args.per_pattern,
        include_original=not args.no_original,
    )
    if args.out is None:
        for query in batch:
            sys.stdout.write(json.dumps(query.to_dict(), ensure_ascii=False) + "\n")
    else:
        write_batch(batch, args.out)
        logger.info("wrote %d queries to %s", len(batch), args.out)
    return 0


def _cmd_search(args: argparse.Namespace) -> int:
    stopwords = load_stopwords(_resolve(args.stopwords, datapaths.stopwords_path))
    corpus = load_corpus(_resolve(args.corpus, datapaths.corpus_path))
    index = SearchIndex(corpus, stopwords)
    if args.query is not None:
        texts = [("CLI", args.query)]
    else:
        texts = [(q.id, q.text) for q in read_batch(args.batch)]
    rows = []
    for qid, text in texts:
        page = index.execute(text, top_k=args.top_k)
        rows.append(
            {
                "query_id": qid,
                "query": text,
                "retrieved": len(page),
                "hits": [{"id": h.doc.id, "title": h.doc.title, "score": h.score} for h in page],
            }
        )
    _emit({"results": rows}, args.out)
    return 0


def _cmd_mine(args: argparse.Namespace) -> int:
    stopwords = load_stopwords(_resolve(args.stopwords, datapaths.stopwords_path))
    corpus = load_corpus(_resolve(args.corpus, datapaths.corpus_path))
    token_lists = [normalize_tokens(f"{d.title} {d.snippet}", stopwords) for d in corpus]
    matrix, vocab = build_matrix(token_lists, ngram_max=args.ngram_max)
    payload: dict = {
        "documents": len(corpus),
        "vocabulary_size": len(vocab),
        "matrix_shape": list(matrix.shape),
    }
    if args.intent:
        intent_tokens = normalize_tokens(args.intent, stopwords)
        mode = "any" if args.relevance == "single-token" else "all"
        payload["intent_tokens"] = intent_tokens
        payload["relevant_documents"] = relevance_count(token_lists, intent_tokens, mode=mode)
    _emit(payload, args.out)
    return 0


def _cmd_attack(args: argparse.Namespace) -> int:
    stopwords = load_stopwords(_resolve(args.stopwords, datapaths.stopwords_path))
    obfuscated = ingest_query_log(args.obfuscated, label=0, format="jsonl-obfuscated")
    real = ingest_query_log(
        _resolve(args.real_log, datapaths.real_queries_path), label=1, format="tsv-queries"
    )
    dataset = merge_datasets(obfuscated, real, stopwords=stopwords)
    report = cross_validate(
        dataset, classifier=args.classifier, folds=args.folds, seed=args.seed, k=args.k
    )
    _emit(report.to_dict(), args.out)
    return 0


def _cmd_session(args: argparse.Namespace) -> int:
    lexicon = load_lexicon(_resolve(args.lexicon, datapaths.lexicon_path))
    stopwords = load_stopwords(_resolve(args.stopwords, datapaths.stopwords_path))
    corpus = load_corpus(_resolve(args.corpus, datapaths.corpus_path))
    index = SearchIndex(corpus, stopwords)
    inventory = load_ads(_resolve(args.ads, datapaths.ads_path))
    master = Random(args.seed)
    if args.batch is not None:
        batch = read_batch(args.batch)
    else:
        batch = generate_batch(
            args.intent,
            lexicon,
            seed=master.getrandbits(64),
            patterns=parse_pattern_set(args.patterns),
            per_pattern=args.per_pattern,
        )
    policy = ClickPolicy(
        k_clicks=args.k_clicks,
        decoy_fraction=args.decoy_fraction,
        include_ads=not args.no_ads_in_profile,
    )
    profile, exposure, log = run_session(
        args.intent,
        batch,
        index,
        inventory,
        policy,
        days=args.days,
        ads_per_day=args.ads_per_day,
        rng=Random(master.getrandbits(64)),
        top_k=args.top_k,
        relevance_mode="any" if args.relevance == "single-token" else "all",
    )
    if args.log_out is not None:
        with args.log_out.open("w", encoding="utf-8") as fh:
            for record in log:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    _emit({"profile": profile.to_dict(), "exposure": exposure.to_dict()}, args.out)
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    config = ExperimentConfig(
        intent=args.intent,
        patterns=args.patterns,
        per_pattern=args.per_pattern,
        top_k=args.top_k,
        k_clicks=args.k_clicks,
        decoy_fraction=args.decoy_fraction,
        days=args.days,
        ads_per_day=args.ads_per_day,
        seed=args.seed,
        relevance=args.relevance,
        corpus=_resolve(args.corpus, datapaths.corpus_path),
        ads=_resolve(args.ads, datapaths.ads_path),
        lexicon=_resolve(args.lexicon, datapaths.lexicon_path),
        stopwords=_resolve(args.stopwords, datapaths.stopwords_path),
        real_log=_resolve(args.real_log, datapaths.real_queries_path),
    )
    report = run_experiment(config)
    written = emit_report(report, args.out)
    for path in written:
        sys.stdout.write(f"{path}\n")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    report = load_report(args.report)
    written = emit_report(report, args.out)
    for path in written:
        sys.stdout.write(f"{path}\n")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .server import serve

    serve(
        host=args.host,
        port=args.port,
        corpus_path=_resolve(args.corpus, datapaths.corpus_path),
        ads_path=_resolve(args.ads, datapaths.ads_path),
        lexicon_path=_resolve(args.lexicon, datapaths.lexicon_path),
        stopwords_path=_resolve(args.stopwords, datapaths.stopwords_path),
        seed=args.seed,
        report_dir=args.report_dir,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distortsearch",
        description="Query-type permutation search obfuscation toolkit",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate an obfuscated query batch")
    p.add_argument("--intent", required=True)
    p.add_argument("--patterns", default=DEFAULT_PATTERN_SET)
    p.add_argument("--per-pattern", type=int, default=8)
    p.add_argument("--no-original", action="store_true", help="omit the bare intent query")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", type=Path, default=None, help="batch JSONL (default: stdout)")
    _add_data_args(p, "lexicon")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("search", help="execute queries against the corpus")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--query", help="a single raw query string")
    group.add_argument("--batch", type=Path, help="batch JSONL from 'generate'")
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--out", type=Path, default=None)
    _add_data_args(p, "corpus", "stopwords")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("mine", help="corpus token/TF-IDF statistics")
    p.add_argument("--ngram-max", type=int, default=1)
    p.add_argument("--intent", default=None, help="also count docs relevant to this intent")
    p.add_argument("--relevance", choices=("tokens-all", "single-token"), default="tokens-all")
    p.add_argument("--out", type=Path, default=None)
    _add_data_args(p, "corpus", "stopwords")
    p.set_defaults(func=_cmd_mine)

    p = sub.add_parser("attack", help="real-vs-obfuscated distinguishability attack")
    p.add_argument("--obfuscated", type=Path, required=True, help="batch JSONL (label 0)")
    p.add_argument("--classifier", choices=("knn", "nb"), default="knn")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--k", type=int, default=3, help="KNN neighbourhood size (odd)")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", type=Path, default=None)
    _add_data_args(p, "real-log", "stopwords")
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("session", help="simulate a click session with ad impressions")
    p.add_argument("--intent", required=True)
    p.add_argument("--batch", type=Path, default=None, help="pre-generated batch JSONL")
    p.add_argument("--patterns", default=DEFAULT_PATTERN_SET)
    p.add_argument("--per-pattern", type=int, default=8)
    p.add_argument("--top-k", type=int, default=100)
    p.add_argument("--k-clicks", type=int, default=2)
    p.add_argument("--decoy-fraction", type=float, default=0.5)
    p.add_argument("--no-ads-in-profile", action="store_true")
    p.add_argument("--days", type=int, default=7)
    p.add_argument("--ads-per-day", type=int, default=42)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--relevance", choices=("tokens-all", "single-token"), default="tokens-all")
    p.add_argument("--log-out", type=Path, default=None, help="session event log JSONL")
    p.add_argument("--out", type=Path, default=None)
    _add_data_args(p, "corpus", "ads", "lexicon", "stopwords")
    p.set_defaults(func=_cmd_session)

    p = sub.add_parser("run", help="full pipeline: generate, search, session, attack, report")
    p.add_argument("--intent", default="buy a toyota 2014")
    p.add_argument("--patterns", default=None)
    p.add_argument("--per-pattern", type=int, default=8)
    p.add_argument("--top-k", type=int, default=100)
    p.add_argument("--k-clicks", type=int, default=2)
    p.add_argument("--decoy-fraction", type=float, default=0.5)
    p.add_argument("--days", type=int, default=7)
    p.add_argument("--ads-per-day", type=int, default=42)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--relevance", choices=("tokens-all", "single-token"), default="tokens-all")
    p.add_argument("--out", type=Path, required=True, help="report output directory")
    _add_data_args(p, "corpus", "ads", "lexicon", "stopwords", "real-log")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("report", help="re-emit CSV/chart artifacts from a report.json")
    p.add_argument("--report", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("serve", help="run the local HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8571)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report-dir", type=Path, default=None)
    _add_data_args(p, "corpus", "ads", "lexicon", "stopwords")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
