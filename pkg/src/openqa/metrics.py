"""Answer-quality and retrieval metrics with SQuAD-style normalization."""

import json
import string
from collections import Counter
from dataclasses import dataclass, field

from .errors import CorpusParseError, EvalNoGold

_PUNCT = set(string.punctuation)
_ARTICLES = {"a", "an", "the"}


def normalize_answer(text: str) -> str:
    """Lowercase, delete punctuation, drop article tokens, collapse whitespace."""
    text = text.lower()
    text = "".join(ch for ch in text if ch not in _PUNCT)
    return " ".join(tok for tok in text.split() if tok not in _ARTICLES)


def exact_match(pred: str, golds) -> int:
    """1 iff the normalized prediction equals some normalized gold answer."""
    norm = normalize_answer(pred)
    return int(any(norm == normalize_answer(g) for g in golds))


def _f1_single(pred: str, gold: str) -> float:
    pred_tokens = normalize_answer(pred).split()
    gold_tokens = normalize_answer(gold).split()
    if not pred_tokens and not gold_tokens:
        return 1.0
    if not pred_tokens or not gold_tokens:
        return 0.0
    overlap = sum((Counter(pred_tokens) & Counter(gold_tokens)).values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred_tokens)
    recall = overlap / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


def f1(pred: str, golds) -> float:
    """Token-multiset F1, maximized over the gold answers."""
    return max(_f1_single(pred, g) for g in golds)


def recall_at_k(results, relevant, k: int) -> float:
    """1.0 if any of the first k results is relevant, else 0.0."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not relevant:
        raise EvalNoGold("relevant set is empty")
    return 1.0 if any(r.passage_id in relevant for r in results[:k]) else 0.0


def mrr(results, relevant) -> float:
    """Reciprocal rank of the first relevant result, 0.0 if none."""
    if not relevant:
        raise EvalNoGold("relevant set is empty")
    for r in results:
        if r.passage_id in relevant:
            return 1.0 / r.rank
    return 0.0


@dataclass
class MetricsReport:
    exact_match: float = 0.0
    f1: float = 0.0
    recall_at_k: dict = field(default_factory=dict)
    mrr: float = 0.0
    n_examples: int = 0

    def to_dict(self) -> dict:
        return {
            "exact_match": self.exact_match,
            "f1": self.f1,
            "recall_at_k": {str(k): v for k, v in sorted(self.recall_at_k.items())},
            "mrr": self.mrr,
            "n_examples": self.n_examples,
        }


def _iter_dataset(path, required):
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusParseError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            missing = [key for key in required if key not in obj]
            if missing:
                raise CorpusParseError(f"line {lineno}: missing fields {missing}")
            yield obj


def evaluate_reader(predict, dataset_path) -> MetricsReport:
    """Score a predictor over a JSONL reader dataset.

    ``predict(question, passage_text_or_None) -> str`` supplies the answer for
    each example; EM and F1 are averaged and scaled to [0, 100].
    """
    em_total = 0.0
    f1_total = 0.0
    n = 0
    for obj in _iter_dataset(dataset_path, ("question", "answers")):
        golds = obj["answers"]
        if not golds:
            raise CorpusParseError("dataset example has empty 'answers'")
        pred = predict(obj["question"], obj.get("passage"))
        em_total += exact_match(pred, golds)
        f1_total += f1(pred, golds)
        n += 1
    report = MetricsReport(n_examples=n)
    if n:
        report.exact_match = 100.0 * em_total / n
        report.f1 = 100.0 * f1_total / n
    return report


def evaluate_retrieval(search, dataset_path, ks=(1, 5, 10)) -> MetricsReport:
    """Score a retrieval function over a JSONL dataset of relevant passage ids.

    ``search(question) -> list[RetrievalResult]`` must return enough results to
    cover max(ks).
    """
    recall_totals = {k: 0.0 for k in ks}
    mrr_total = 0.0
    n = 0
    for obj in _iter_dataset(dataset_path, ("question", "relevant")):
        relevant = set(obj["relevant"])
        results = search(obj["question"])
        for k in ks:
            recall_totals[k] += recall_at_k(results, relevant, k)
        mrr_total += mrr(results, relevant)
        n += 1
    report = MetricsReport(n_examples=n)
    if n:
        report.recall_at_k = {k: total / n for k, total in recall_totals.items()}
        report.mrr = mrr_total / n
    return report
