"""Operator entry points: index, search, ask, eval, qgen, serve.

Machine-readable output (JSON/JSONL) goes to stdout; diagnostics go to stderr.
Exit codes: 0 success, 2 usage error, 1 runtime error.
"""

import argparse
import json
import logging
import os
import sys

from .corpus import (
    Collection,
    Passage,
    ingest_jsonl,
    ingest_tsv,
    tokenize,
    DEFAULT_STRIDE,
    DEFAULT_WINDOW,
)
from .dense import DenseIndex, EmbedderSpec, build_dense, save_dense, search_late, search_pooled
from .errors import OpenQAError
from .metrics import evaluate_reader, evaluate_retrieval
from .qgen import generate_pairs, load_table_csv
from .reader import ReaderParams, extract_answers, lexical_scorer
from .sparse import SparseIndex, SparseParams, build_sparse, corpus_idf, save_sparse, search_sparse
from .storage import load_index

log = logging.getLogger("openqa")


def _ingest(path, window, stride):
    if str(path).endswith(".tsv"):
        return ingest_tsv(path, window, stride)
    return ingest_jsonl(path, window, stride)


def cmd_index(args) -> int:
    collection = _ingest(args.input, args.window, args.stride)
    log.info("ingested %d passages from %s", len(collection), args.input)
    if args.mode == "sparse":
        index = build_sparse(collection, SparseParams(k1=args.k1, b=args.b))
        save_sparse(index, args.out)
    else:
        mode = "pooled" if args.mode == "dense_pooled" else "late"
        index = build_dense(collection, EmbedderSpec("hash-test", args.dim), mode)
        save_dense(index, args.out)
    log.info("saved %s index to %s", args.mode, args.out)
    return 0


def _search_any(index, query, k):
    if isinstance(index, SparseIndex):
        return search_sparse(index, query, k)
    if isinstance(index, DenseIndex) and index.mode == "pooled":
        return search_pooled(index, query, k)
    return search_late(index, query, k)


def cmd_search(args) -> int:
    index = load_index(args.index)
    for result in _search_any(index, args.query, args.k):
        print(json.dumps({"passage_id": result.passage_id, "score": result.score, "rank": result.rank}))
    return 0


def cmd_ask(args) -> int:
    from .service.app import build_runtimes
    from .service.config import load_config

    runtimes = build_runtimes(load_config(args.config))
    runtime = runtimes.get(args.collection)
    if runtime is None:
        raise OpenQAError(f"unknown collection {args.collection!r}")
    result = runtime.pipeline.ask(args.question)
    payload = {
        "question_id": result.question_id,
        "answers": [
            {
                "text": a.text,
                "score": a.score,
                "kind": a.kind,
                "passage_id": a.passage_id,
                "char_start": a.char_start,
                "char_end": a.char_end,
            }
            for a in result.answers
        ],
        "passages": [
            {
                "passage_id": r.passage_id,
                "score": r.score,
                "rank": r.rank,
                "text": p.text,
                "title": p.title,
            }
            for r, p in zip(result.passages, result.evidence)
        ],
    }
    print(json.dumps(payload))
    return 0


def _context_passage(text):
    return Passage("ctx#0", "ctx", "", text, 0, max(1, len(tokenize(text))))


def cmd_eval(args) -> int:
    if args.mode == "reader":
        contexts = []
        with open(args.dataset, encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    text = json.loads(line).get("passage")
                    if text:
                        contexts.append(_context_passage(text))
        idf = corpus_idf(Collection(contexts)) if contexts else {}
        scorer = lambda question, passage: lexical_scorer(question, passage, idf)

        def predict(question, passage_text):
            if not passage_text:
                return ""
            answers = extract_answers(question, [_context_passage(passage_text)], scorer, ReaderParams())
            top = answers[0]
            return top.text if top.kind != "no_answer" else ""

        report = evaluate_reader(predict, args.dataset)
    else:
        if not args.index:
            raise OpenQAError("eval --mode retrieval requires --index")
        index = load_index(args.index)
        ks = tuple(int(k) for k in args.ks.split(","))
        max_k = max(ks)
        report = evaluate_retrieval(lambda q: _search_any(index, q, max_k), args.dataset, ks=ks)
    print(json.dumps(report.to_dict()))
    return 0


def cmd_qgen(args) -> int:
    if args.table:
        source = load_table_csv(args.table)
    else:
        source = list(_ingest(args.passages, DEFAULT_WINDOW, DEFAULT_STRIDE))
    for pair in generate_pairs(source, budget=args.n, seed=args.seed):
        provenance = list(pair.provenance) if isinstance(pair.provenance, tuple) else pair.provenance
        print(
            json.dumps(
                {
                    "question": pair.question,
                    "answer": pair.answer,
                    "source": pair.source,
                    "provenance": provenance,
                },
                ensure_ascii=False,
            )
        )
    return 0


def cmd_serve(args) -> int:
    from .service.app import serve

    serve(args.config, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="openqa", description="Open-retrieval QA toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build and save a retrieval index")
    p.add_argument("--input", required=True, help="corpus file (.jsonl or .tsv)")
    p.add_argument("--out", required=True, help="output index directory")
    p.add_argument("--mode", required=True, choices=["sparse", "dense_pooled", "dense_late"])
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--stride", type=int, default=DEFAULT_STRIDE)
    p.add_argument("--k1", type=float, default=0.9)
    p.add_argument("--b", type=float, default=0.4)
    p.add_argument("--dim", type=int, default=16)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="query a saved index, one JSON result per line")
    p.add_argument("--index", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--k", type=int, default=10)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("ask", help="end-to-end question answering against a configured collection")
    p.add_argument("--config", required=True)
    p.add_argument("--collection", required=True)
    p.add_argument("--question", required=True)
    p.set_defaults(func=cmd_ask)

    p = sub.add_parser("eval", help="score a reader or retrieval dataset")
    p.add_argument("--mode", required=True, choices=["reader", "retrieval"])
    p.add_argument("--dataset", required=True)
    p.add_argument("--index", help="index directory (retrieval mode)")
    p.add_argument("--ks", default="1,5,10", help="comma-separated recall cutoffs")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("qgen", help="generate question-answer pairs as JSONL")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--passages", help="corpus file (.jsonl or .tsv)")
    group.add_argument("--table", help="CSV table with a header row")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_qgen)

    p = sub.add_parser("serve", help="run the REST service")
    p.add_argument("--config", required=True)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("QA_LOG", "error"), logging.ERROR
    )
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OpenQAError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
