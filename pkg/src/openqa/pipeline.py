"""Plug-and-play composition of retriever backends with readers into an end-to-end pipeline."""

import itertools
import random
from dataclasses import dataclass, field, replace

import httpx

from .corpus import Collection, Passage, RetrievalResult, tokenize
from .dense import DenseIndex, search_late, search_pooled
from .errors import BackendUnavailable, PipelineUnknownComponent
from .reader import Answer, ReaderParams, extract_answers, generative_read, lexical_scorer
from .sparse import SparseIndex, corpus_idf, search_sparse

RETRIEVER_NAMES = ("sparse", "dense_pooled", "dense_late", "external")
READER_NAMES = ("extractive", "generative")

_question_counter = itertools.count(1)


def _new_question_id() -> str:
    return f"q{next(_question_counter):06d}-{random.getrandbits(64):016x}"


@dataclass(frozen=True)
class PipelineConfig:
    retriever: str = "sparse"
    reader: str = "extractive"
    k_passages: int = 10
    mix_alpha: float = 0.3
    reader_params: ReaderParams = field(default_factory=ReaderParams)


@dataclass
class AnswerSet:
    answers: list
    passages: list  # RetrievalResult, the evidence set
    question_id: str
    evidence: list = field(default_factory=list)  # Passage per retrieval result


class SparseRetriever:
    def __init__(self, index: SparseIndex):
        self.index = index

    def retrieve(self, query, k):
        results = search_sparse(self.index, query, k)
        return [(r, self.index.collection.get(r.passage_id)) for r in results]


class DenseRetriever:
    def __init__(self, index: DenseIndex):
        self.index = index

    def retrieve(self, query, k):
        if self.index.mode == "pooled":
            results = search_pooled(self.index, query, k)
        else:
            results = search_late(self.index, query, k)
        return [(r, self.index.collection.get(r.passage_id)) for r in results]


@dataclass(frozen=True)
class ExternalRetrieverSpec:
    endpoint: str
    result_path: str  # dot-separated path to the hits array
    id_field: str
    text_field: str
    score_field: str


class ExternalRetriever:
    """Declarative adapter for an external search engine: POSTs the query and maps hit fields."""

    def __init__(self, spec: ExternalRetrieverSpec, timeout: float = 30.0):
        self.spec = spec
        self.timeout = timeout

    def retrieve(self, query, k):
        try:
            resp = httpx.post(self.spec.endpoint, json={"query": query, "k": k}, timeout=self.timeout)
            resp.raise_for_status()
            data = resp.json()
        except (httpx.HTTPError, ValueError) as exc:
            raise BackendUnavailable(f"external engine {self.spec.endpoint}: {exc}") from exc
        hits = data
        for key in self.spec.result_path.split("."):
            if key:
                hits = hits[key]
        scored = []
        for hit in hits:
            pid = str(hit[self.spec.id_field])
            text = str(hit[self.spec.text_field])
            score = float(hit[self.spec.score_field])
            passage = Passage(pid, pid, str(hit.get("title", "")), text, 0, max(1, len(tokenize(text))))
            scored.append((score, pid, passage))
        scored.sort(key=lambda item: (-item[0], item[1]))
        return [
            (RetrievalResult(pid, score, rank), passage)
            for rank, (score, pid, passage) in enumerate(scored[:k], start=1)
        ]


class ExtractiveReader:
    def __init__(self, idf: dict, scorer=None):
        self.scorer = scorer or (lambda question, passage: lexical_scorer(question, passage, idf))

    def read(self, question, passages, params):
        return extract_answers(question, passages, self.scorer, params)


class GenerativeReader:
    def __init__(self, endpoint: str):
        self.endpoint = endpoint

    def read(self, question, passages, params):
        return [generative_read(question, passages, self.endpoint)]


class ComponentRegistry:
    """Named retriever and reader backends available for composition."""

    def __init__(self):
        self.retrievers = {}
        self.readers = {}

    def register_retriever(self, name, backend):
        self.retrievers[name] = backend
        return self

    def register_reader(self, name, backend):
        self.readers[name] = backend
        return self


def default_registry(
    collection: Collection | None = None,
    sparse_index: SparseIndex | None = None,
    dense_index: DenseIndex | None = None,
    external_spec: ExternalRetrieverSpec | None = None,
    generator_endpoint: str | None = None,
    scorer=None,
) -> ComponentRegistry:
    """Wire the standard backends from whichever components are at hand."""
    registry = ComponentRegistry()
    if sparse_index is not None:
        registry.register_retriever("sparse", SparseRetriever(sparse_index))
        idf = sparse_index.idf_map()
    elif collection is not None:
        idf = corpus_idf(collection)
    else:
        idf = {}
    if dense_index is not None:
        name = "dense_pooled" if dense_index.mode == "pooled" else "dense_late"
        registry.register_retriever(name, DenseRetriever(dense_index))
    if external_spec is not None:
        registry.register_retriever("external", ExternalRetriever(external_spec))
    registry.register_reader("extractive", ExtractiveReader(idf, scorer=scorer))
    if generator_endpoint:
        registry.register_reader("generative", GenerativeReader(generator_endpoint))
    return registry


class Pipeline:
    """Immutable retriever+reader pair; ask() is safe to call concurrently."""

    def __init__(self, config: PipelineConfig, retriever, reader):
        self.config = config
        self.retriever = retriever
        self.reader = reader

    def ask(self, question: str) -> AnswerSet:
        if not question.strip():
            raise ValueError("question must be non-empty")
        retrieved = self.retriever.retrieve(question, self.config.k_passages)
        question_id = _new_question_id()
        if not retrieved:
            return AnswerSet([Answer(kind="no_answer", text="", score=0.0)], [], question_id)
        results = [r for r, _ in retrieved]
        passages = [p for _, p in retrieved]
        answers = self.reader.read(question, passages, self.config.reader_params)
        answers = self._mix_scores(answers, results)
        return AnswerSet(answers, results, question_id, evidence=passages)

    def _mix_scores(self, answers, results):
        alpha = self.config.mix_alpha
        scores = [r.score for r in results]
        lo, hi = min(scores), max(scores)
        span = hi - lo

        def retrieval_norm(passage_id):
            if len(scores) == 1 or span == 0.0:
                return 1.0
            by_id = next(r.score for r in results if r.passage_id == passage_id)
            return (by_id - lo) / span

        mixed = []
        for answer in answers:
            if answer.kind == "span":
                final = alpha * retrieval_norm(answer.passage_id) + (1.0 - alpha) * answer.score
                mixed.append(replace(answer, score=final))
            else:
                mixed.append(answer)
        mixed.sort(key=lambda a: -a.score)
        return mixed


def compose(config: PipelineConfig, registry: ComponentRegistry) -> Pipeline:
    """Pair any registered retriever with any registered reader."""
    if config.retriever not in registry.retrievers:
        raise PipelineUnknownComponent(f"unknown retriever {config.retriever!r}")
    if config.reader not in registry.readers:
        raise PipelineUnknownComponent(f"unknown reader {config.reader!r}")
    return Pipeline(config, registry.retrievers[config.retriever], registry.readers[config.reader])
