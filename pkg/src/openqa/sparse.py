"""Inverted-index BM25 retrieval.

Scoring follows the Lucene-style variant with non-negative idf:

    score(q, d) = sum over distinct query terms t of
                  idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * |d| / avgdl))
    idf(t)      = ln(1 + (N - df + 0.5) / (df + 0.5))
"""

import json
import math
import os
from dataclasses import dataclass

from .corpus import Collection, RetrievalResult, load_collection, save_collection, tokenize
from .errors import IndexCorrupt, IndexEmptyCollection, IndexUnknownPassage
from .storage import read_manifest, write_manifest

POSTINGS_NAME = "postings.json"
COLLECTION_NAME = "collection.jsonl"


@dataclass(frozen=True)
class SparseParams:
    k1: float = 0.9
    b: float = 0.4


@dataclass
class IndexStats:
    N: int
    avgdl: float
    df: dict
    doclen: dict


class SparseIndex:
    """Immutable BM25 index over one collection."""

    def __init__(self, collection: Collection, params: SparseParams, postings: dict, stats: IndexStats):
        self.collection = collection
        self.params = params
        self.postings = postings  # term -> {passage_id: tf}
        self.stats = stats

    def idf(self, term: str) -> float:
        df = self.stats.df.get(term)
        if df is None:
            return 0.0
        return math.log(1.0 + (self.stats.N - df + 0.5) / (df + 0.5))

    def idf_map(self) -> dict:
        return {t: self.idf(t) for t in self.stats.df}


def query_terms(query: str) -> list[str]:
    """Distinct query token surfaces in first-occurrence order."""
    return list(dict.fromkeys(t.surface for t in tokenize(query)))


def build_sparse(collection: Collection, params: SparseParams | None = None) -> SparseIndex:
    if len(collection) == 0:
        raise IndexEmptyCollection("cannot build an index over zero passages")
    params = params or SparseParams()
    postings: dict = {}
    doclen = {}
    for passage in collection:
        tokens = [t.surface for t in tokenize(passage.text)]
        doclen[passage.passage_id] = len(tokens)
        counts: dict = {}
        for tok in tokens:
            counts[tok] = counts.get(tok, 0) + 1
        for term, tf in counts.items():
            postings.setdefault(term, {})[passage.passage_id] = tf
    df = {term: len(plist) for term, plist in postings.items()}
    n = len(collection)
    avgdl = sum(doclen.values()) / n
    return SparseIndex(collection, params, postings, IndexStats(n, avgdl, df, doclen))


def _length_norm(index: SparseIndex, passage_id: str) -> float:
    k1, b = index.params.k1, index.params.b
    return k1 * (1.0 - b + b * index.stats.doclen[passage_id] / index.stats.avgdl)


def bm25_score(index: SparseIndex, query: str, passage_id: str) -> float:
    """Exact BM25 score of one passage; 0 when no query term occurs in it."""
    if passage_id not in index.stats.doclen:
        raise IndexUnknownPassage(passage_id)
    k1 = index.params.k1
    norm = _length_norm(index, passage_id)
    score = 0.0
    for term in query_terms(query):
        tf = index.postings.get(term, {}).get(passage_id)
        if not tf:
            continue
        score += index.idf(term) * (tf * (k1 + 1.0)) / (tf + norm)
    return score


def search_sparse(index: SparseIndex, query: str, k: int) -> list[RetrievalResult]:
    """Top-k passages with positive score, descending, ties by ascending passage id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    k1 = index.params.k1
    scores: dict = {}
    for term in query_terms(query):
        plist = index.postings.get(term)
        if not plist:
            continue
        idf = index.idf(term)
        for passage_id, tf in plist.items():
            contrib = idf * (tf * (k1 + 1.0)) / (tf + _length_norm(index, passage_id))
            scores[passage_id] = scores.get(passage_id, 0.0) + contrib
    ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))[:k]
    return [RetrievalResult(pid, score, rank) for rank, (pid, score) in enumerate(ranked, start=1)]


def corpus_idf(collection: Collection) -> dict:
    """Idf map computed directly from a collection, for pipelines without a sparse index."""
    df: dict = {}
    for passage in collection:
        for term in {t.surface for t in tokenize(passage.text)}:
            df[term] = df.get(term, 0) + 1
    n = len(collection)
    return {t: math.log(1.0 + (n - c + 0.5) / (c + 0.5)) for t, c in df.items()}


def save_sparse(index: SparseIndex, directory) -> None:
    os.makedirs(directory, exist_ok=True)
    write_manifest(
        directory,
        {
            "type": "sparse",
            "k1": repr(index.params.k1),
            "b": repr(index.params.b),
            "N": index.stats.N,
            "avgdl": repr(index.stats.avgdl),
        },
    )
    payload = {
        "postings": {term: list(plist.items()) for term, plist in index.postings.items()},
        "doclen": index.stats.doclen,
    }
    with open(os.path.join(directory, POSTINGS_NAME), "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False)
    save_collection(index.collection, os.path.join(directory, COLLECTION_NAME))


def load_sparse(directory) -> SparseIndex:
    entries = read_manifest(directory)
    if entries.get("type") != "sparse":
        raise IndexCorrupt(f"{directory} is not a sparse index (type={entries.get('type')!r})")
    postings_path = os.path.join(directory, POSTINGS_NAME)
    collection_path = os.path.join(directory, COLLECTION_NAME)
    if not os.path.isfile(postings_path) or not os.path.isfile(collection_path):
        raise IndexCorrupt(f"missing index files in {directory}")
    try:
        params = SparseParams(k1=float(entries["k1"]), b=float(entries["b"]))
    except (KeyError, ValueError) as exc:
        raise IndexCorrupt(f"bad manifest in {directory}: {exc}") from exc
    try:
        with open(postings_path, encoding="utf-8") as f:
            payload = json.load(f)
        postings = {term: {pid: tf for pid, tf in plist} for term, plist in payload["postings"].items()}
        doclen = payload["doclen"]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise IndexCorrupt(f"unreadable postings in {directory}: {exc}") from exc
    collection = load_collection(collection_path)
    df = {term: len(plist) for term, plist in postings.items()}
    n = len(collection)
    if n == 0 or n != len(doclen):
        raise IndexCorrupt(f"postings and collection disagree in {directory}")
    avgdl = sum(doclen.values()) / n
    return SparseIndex(collection, params, postings, IndexStats(n, avgdl, df, doclen))
