import json
import random
import string

import pytest

from openqa.corpus import RetrievalResult
from openqa.errors import EvalNoGold
from openqa.metrics import (
    evaluate_reader,
    evaluate_retrieval,
    exact_match,
    f1,
    mrr,
    normalize_answer,
    recall_at_k,
)


class TestNormalize:
    def test_article_and_punct(self):
        assert normalize_answer("The Cat!") == "cat"

    def test_empty(self):
        assert normalize_answer("") == ""

    def test_articles_only(self):
        assert normalize_answer("a  an the") == ""

    def test_idempotent_random(self):
        rng = random.Random(3)
        alphabet = string.ascii_letters + string.digits + string.punctuation + "  "
        for _ in range(500):
            s = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 40)))
            once = normalize_answer(s)
            assert normalize_answer(once) == once


class TestExactMatch:
    def test_normalized_match(self):
        assert exact_match("The Cat", ["cat"]) == 1

    def test_identity(self):
        assert exact_match("cat", ["cat"]) == 1

    def test_mismatch(self):
        assert exact_match("dog", ["cat"]) == 0

    def test_any_gold(self):
        assert exact_match("dog", ["cat", "a Dog!"]) == 1


class TestF1:
    def test_partial(self):
        assert f1("green apples", ["apples"]) == pytest.approx(2 / 3, abs=1e-12)

    def test_exact(self):
        assert f1("x", ["x"]) == 1.0

    def test_both_empty(self):
        assert f1("", [""]) == 1.0

    def test_one_empty(self):
        assert f1("", ["x"]) == 0.0
        assert f1("x", [""]) == 0.0

    def test_multiset_overlap(self):
        # "b b" vs "b": overlap 1, p=1/2, r=1
        assert f1("b b", ["b"]) == pytest.approx(2 / 3)

    def test_symmetry_single_gold(self):
        rng = random.Random(5)
        vocab = ["red", "green", "blue", "cat", "dog"]
        for _ in range(100):
            a = " ".join(rng.choice(vocab) for _ in range(rng.randrange(0, 6)))
            b = " ".join(rng.choice(vocab) for _ in range(rng.randrange(0, 6)))
            assert f1(a, [b]) == pytest.approx(f1(b, [a]), abs=1e-12)

    def test_em_implies_f1(self):
        cases = [("The Cat", ["cat"]), ("a  big DOG!", ["big dog"])]
        for pred, golds in cases:
            assert exact_match(pred, golds) == 1
            assert f1(pred, golds) == 1.0


def results_of(*pids):
    return [RetrievalResult(pid, 1.0 / rank, rank) for rank, pid in enumerate(pids, start=1)]


class TestRetrievalMetrics:
    def test_recall_examples(self):
        results = results_of("p3", "p1")
        assert recall_at_k(results, {"p1"}, 1) == 0.0
        assert recall_at_k(results, {"p1"}, 2) == 1.0

    def test_recall_none(self):
        assert recall_at_k(results_of("p3", "p4"), {"p1"}, 5) == 0.0

    def test_recall_k_beyond_results(self):
        results = results_of("p1")
        assert recall_at_k(results, {"p1"}, 100) == recall_at_k(results, {"p1"}, 1)

    def test_recall_monotone_in_k(self):
        results = results_of("a", "b", "c", "d")
        values = [recall_at_k(results, {"c"}, k) for k in range(1, 6)]
        assert values == sorted(values)

    def test_recall_requires_gold(self):
        with pytest.raises(EvalNoGold):
            recall_at_k(results_of("p1"), set(), 1)

    def test_mrr(self):
        assert mrr(results_of("p9", "p1"), {"p1"}) == 0.5
        assert mrr(results_of("p1"), {"p1"}) == 1.0
        assert mrr(results_of("p9"), {"p1"}) == 0.0
        with pytest.raises(EvalNoGold):
            mrr(results_of("p1"), set())


class TestEvaluate:
    def write_dataset(self, tmp_path, rows):
        path = tmp_path / "data.jsonl"
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
        return path

    def test_reader_all_correct(self, tmp_path):
        rows = [
            {"id": "1", "question": "q1", "answers": ["alpha"], "passage": "alpha"},
            {"id": "2", "question": "q2", "answers": ["beta"], "passage": "beta"},
        ]
        path = self.write_dataset(tmp_path, rows)
        report = evaluate_reader(lambda q, p: p, path)
        assert report.exact_match == 100.0
        assert report.f1 == 100.0
        assert report.n_examples == 2

    def test_reader_half_correct(self, tmp_path):
        rows = [
            {"id": "1", "question": "q1", "answers": ["alpha"]},
            {"id": "2", "question": "q2", "answers": ["beta"]},
        ]
        path = self.write_dataset(tmp_path, rows)
        report = evaluate_reader(lambda q, p: "alpha", path)
        assert report.exact_match == 50.0

    def test_reader_normalization_only_differences(self, tmp_path):
        rows = [{"id": "1", "question": "q", "answers": ["The Cat"]}]
        path = self.write_dataset(tmp_path, rows)
        report = evaluate_reader(lambda q, p: "cat!", path)
        assert report.exact_match == 100.0

    def test_retrieval(self, tmp_path):
        rows = [
            {"id": "1", "question": "qa", "relevant": ["p1"]},
            {"id": "2", "question": "qb", "relevant": ["p9"]},
        ]
        path = self.write_dataset(tmp_path, rows)
        report = evaluate_retrieval(lambda q: results_of("p1", "p2"), path, ks=(1, 2))
        assert report.recall_at_k == {1: 0.5, 2: 0.5}
        assert report.mrr == 0.5
        assert report.to_dict()["recall_at_k"] == {"1": 0.5, "2": 0.5}
