"""Extractive span decoding with boolean/list handling, plus the generative-reader client.

The neural span scorer is pluggable: anything callable as
``scorer(question, passage) -> ScoreVectors`` works, including the built-in
idf-weighted lexical scorer and the remote HTTP scorer.
"""

from dataclasses import dataclass, field

import httpx

from .corpus import Passage, content_terms, tokenize
from .errors import GeneratorUnavailable, ReaderNoContext, ReaderScoreShape
from .metrics import normalize_answer

BOOLEAN_LEADS = frozenset(
    "is are was were do does did can could will would should has have had".split()
)


@dataclass
class ScoreVectors:
    start: list
    end: list


@dataclass
class Span:
    token_start: int
    token_end: int  # inclusive
    score: float
    char_start: int = 0
    char_end: int = 0


@dataclass
class Answer:
    kind: str  # span | boolean | list | generated | no_answer
    text: str
    score: float
    passage_id: str = ""
    char_start: int | None = None
    char_end: int | None = None
    items: list | None = None


@dataclass(frozen=True)
class ReaderParams:
    max_answer_tokens: int = 30
    top_k: int = 5
    null_threshold: float = 0.0
    boolean_overlap_threshold: float = 0.5


NO_ANSWER = Answer(kind="no_answer", text="", score=0.0)


def decode_spans(scores: ScoreVectors, max_answer_tokens: int, k: int, tokens=None) -> list[Span]:
    """Top-k spans by start+end score with greedy non-overlap suppression.

    Candidates are all (s, e) with s <= e and length <= max_answer_tokens; ties
    break on smaller s, then smaller e. When ``tokens`` is given, char offsets
    are filled from it.
    """
    start, end = scores.start, scores.end
    n = len(start)
    if len(end) != n:
        raise ReaderScoreShape(f"start has {n} scores, end has {len(end)}")
    candidates = [
        (s, e)
        for s in range(n)
        for e in range(s, min(s + max_answer_tokens, n))
    ]
    candidates.sort(key=lambda se: (-(start[se[0]] + end[se[1]]), se[0], se[1]))
    accepted: list[Span] = []
    for s, e in candidates:
        if len(accepted) == k:
            break
        if any(not (e < sp.token_start or s > sp.token_end) for sp in accepted):
            continue
        span = Span(s, e, start[s] + end[e])
        if tokens is not None:
            span.char_start = tokens[s].char_start
            span.char_end = tokens[e].char_end
        accepted.append(span)
    return accepted


def classify_question(text: str) -> str:
    """Heuristic routing to factoid / boolean / list; factoid is the default."""
    toks = [t.surface for t in tokenize(text)]
    if not toks:
        return "factoid"
    if toks[0] in BOOLEAN_LEADS:
        return "boolean"
    if "list" in toks or (toks[0] in ("name", "which") and "all" in toks[1:]):
        return "list"
    return "factoid"


def lexical_scorer(question: str, passage: Passage, idf: dict) -> ScoreVectors:
    """Deterministic scorer: each passage token scores the idf of the question term it equals."""
    terms = content_terms(question)
    values = [
        idf.get(tok.surface, 0.0) if tok.surface in terms else 0.0
        for tok in tokenize(passage.text)
    ]
    return ScoreVectors(values, list(values))


class RemoteSpanScorer:
    """Client for an external span-scoring service speaking the /score protocol."""

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def __call__(self, question: str, passage: Passage) -> ScoreVectors:
        body = {"question": question, "passage": passage.text}
        try:
            resp = httpx.post(self.endpoint + "/score", json=body, timeout=self.timeout)
            resp.raise_for_status()
            data = resp.json()
        except (httpx.HTTPError, ValueError) as exc:
            raise GeneratorUnavailable(f"{self.endpoint}: {exc}") from exc
        return ScoreVectors(data["start"], data["end"])


def _decode_passage(question, passage, scorer, params, k):
    tokens = tokenize(passage.text)
    scores = scorer(question, passage)
    if len(scores.start) != len(tokens):
        raise ReaderScoreShape(
            f"scorer returned {len(scores.start)} scores for {len(tokens)} tokens"
        )
    spans = decode_spans(scores, params.max_answer_tokens, k, tokens=tokens)
    return spans


def extract_answers(question: str, passages, scorer, params: ReaderParams | None = None) -> list[Answer]:
    """Answer a question from the given passages, routed by question class.

    Factoid questions merge per-passage spans into a global top-k with
    normalized-text dedup; boolean questions report term-overlap against the
    best passage; list questions return the best passage's non-overlapping
    spans as one answer.
    """
    params = params or ReaderParams()
    passages = list(passages)
    if not passages:
        raise ReaderNoContext("no passages to read")
    kind = classify_question(question)

    if kind == "boolean":
        best = passages[0]
        terms = content_terms(question)
        present = {t.surface for t in tokenize(best.text)}
        fraction = len(terms & present) / len(terms) if terms else 0.0
        verdict = "yes" if fraction >= params.boolean_overlap_threshold else "no"
        return [Answer(kind="boolean", text=verdict, score=fraction, passage_id=best.passage_id)]

    if kind == "list":
        best = passages[0]
        spans = _decode_passage(question, best, scorer, params, params.top_k)
        text = ", ".join(best.text[sp.char_start : sp.char_end] for sp in spans)
        score = spans[0].score if spans else 0.0
        return [Answer(kind="list", text=text, score=score, passage_id=best.passage_id, items=spans)]

    merged = []
    for order, passage in enumerate(passages):
        for span in _decode_passage(question, passage, scorer, params, params.top_k):
            merged.append((span, passage, order))
    merged.sort(key=lambda item: (-item[0].score, item[2], item[0].token_start, item[0].token_end))
    answers = []
    seen_texts = set()
    for span, passage, _ in merged:
        text = passage.text[span.char_start : span.char_end]
        norm = normalize_answer(text)
        if norm in seen_texts:
            continue
        seen_texts.add(norm)
        answers.append(
            Answer(
                kind="span",
                text=text,
                score=span.score,
                passage_id=passage.passage_id,
                char_start=span.char_start,
                char_end=span.char_end,
            )
        )
        if len(answers) == params.top_k:
            break
    if not answers or answers[0].score < params.null_threshold:
        return [Answer(kind="no_answer", text="", score=0.0)]
    return answers


def assemble_generative_input(question: str, passages) -> list[str]:
    """One generator input string per passage, order preserved."""
    passages = list(passages)
    if not passages:
        raise ReaderNoContext("no passages to encode")
    return [f"question: {question} title: {p.title} context: {p.text}" for p in passages]


def generative_read(question: str, passages, endpoint: str, timeout: float = 60.0) -> Answer:
    """Send assembled inputs to a remote generator and wrap its reply as an answer."""
    inputs = assemble_generative_input(question, passages)
    try:
        resp = httpx.post(endpoint.rstrip("/") + "/generate", json={"inputs": inputs}, timeout=timeout)
        resp.raise_for_status()
        data = resp.json()
    except (httpx.HTTPError, ValueError) as exc:
        raise GeneratorUnavailable(f"{endpoint}: {exc}") from exc
    return Answer(
        kind="generated",
        text=str(data["text"]),
        score=float(data.get("score", 0.0)),
        passage_id=passages[0].passage_id,
    )
