import json
import random
import string

import pytest

from openqa.corpus import (
    Collection,
    Document,
    ingest_jsonl,
    ingest_tsv,
    split_passages,
    tokenize,
)
from openqa.errors import CorpusDuplicateId, CorpusEmptyDocument, CorpusParseError


def surfaces(text):
    return [t.surface for t in tokenize(text)]


class TestTokenize:
    def test_basic(self):
        assert surfaces("The Cat, sat!") == ["the", "cat", "sat"]

    def test_empty(self):
        assert tokenize("") == []

    def test_separator_splits(self):
        assert surfaces("a1-b2") == ["a1", "b2"]

    def test_offsets_point_into_source(self):
        text = "The Cat, sat!"
        for tok in tokenize(text):
            assert tok.char_start < tok.char_end
            assert text[tok.char_start : tok.char_end].lower() == tok.surface

    def test_unicode_alnum(self):
        assert surfaces("Zoë café №42") == ["zoë", "café", "42"]

    def test_idempotent_on_surfaces(self):
        rng = random.Random(7)
        alphabet = string.ascii_letters + string.digits + " ,.!-_éÜß"
        for _ in range(200):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 60)))
            once = surfaces(text)
            again = surfaces(" ".join(once))
            assert once == again


class TestSplitPassages:
    def ten_token_doc(self):
        return Document("d", "", " ".join(f"w{i}" for i in range(10)))

    def test_window_stride(self):
        parts = split_passages(self.ten_token_doc(), window=4, stride=3)
        assert [(p.token_start, p.token_count) for p in parts] == [(0, 4), (3, 4), (6, 4)]
        assert [p.passage_id for p in parts] == ["d#0", "d#1", "d#2"]

    def test_short_doc_single_window(self):
        parts = split_passages(Document("d", "", "one two three"), window=100, stride=50)
        assert len(parts) == 1
        assert parts[0].token_count == 3

    def test_truncated_tail(self):
        doc = Document("d", "", "a b c d e")
        parts = split_passages(doc, window=4, stride=2)
        assert [(p.token_start, p.token_count) for p in parts] == [(0, 4), (2, 3)]

    def test_text_is_char_span(self):
        doc = Document("d", "T", "alpha, beta; gamma delta epsilon")
        for p in split_passages(doc, window=2, stride=2):
            assert p.text in doc.text
            assert surfaces(p.text) == surfaces(doc.text)[p.token_start : p.token_start + p.token_count]

    def test_empty_doc_rejected(self):
        with pytest.raises(CorpusEmptyDocument):
            split_passages(Document("d", "", "...!"), window=4, stride=2)

    def test_bad_params_rejected(self):
        doc = self.ten_token_doc()
        with pytest.raises(ValueError):
            split_passages(doc, window=0, stride=1)
        with pytest.raises(ValueError):
            split_passages(doc, window=4, stride=5)

    def test_coverage_invariant(self):
        rng = random.Random(11)
        for _ in range(50):
            n = rng.randrange(1, 40)
            doc = Document("d", "", " ".join(f"t{i}" for i in range(n)))
            window = rng.randrange(1, 12)
            stride = rng.randrange(1, window + 1)
            covered = set()
            for p in split_passages(doc, window, stride):
                covered.update(range(p.token_start, p.token_start + p.token_count))
            assert covered == set(range(n))


class TestIngest:
    def write(self, tmp_path, name, lines):
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    def test_jsonl(self, tmp_path):
        words = " ".join(f"w{i}" for i in range(50))
        path = self.write(
            tmp_path,
            "c.jsonl",
            [json.dumps({"id": "d1", "text": words}), json.dumps({"id": "d2", "text": words, "title": "T"})],
        )
        coll = ingest_jsonl(path, window=100, stride=50)
        assert coll.ids() == ["d1#0", "d2#0"]
        assert coll.get("d2#0").title == "T"

    def test_jsonl_duplicate_id(self, tmp_path):
        rec = json.dumps({"id": "d1", "text": "hello"})
        other = json.dumps({"id": "d2", "text": "hello"})
        path = self.write(tmp_path, "c.jsonl", [rec, other, rec])
        with pytest.raises(CorpusDuplicateId, match="line 3"):
            ingest_jsonl(path)

    def test_jsonl_missing_text(self, tmp_path):
        path = self.write(tmp_path, "c.jsonl", [json.dumps({"id": "d1"})])
        with pytest.raises(CorpusParseError, match="line 1"):
            ingest_jsonl(path)

    def test_jsonl_invalid_json(self, tmp_path):
        path = self.write(tmp_path, "c.jsonl", ['{"id": "d1", "text": "x"}', "{nope"])
        with pytest.raises(CorpusParseError, match="line 2"):
            ingest_jsonl(path)

    def test_tsv(self, tmp_path):
        path = self.write(tmp_path, "c.tsv", ["d1\thello world\tGreeting"])
        coll = ingest_tsv(path)
        assert coll.ids() == ["d1#0"]
        assert coll.get("d1#0").title == "Greeting"

    def test_tsv_single_field_rejected(self, tmp_path):
        path = self.write(tmp_path, "c.tsv", ["d1"])
        with pytest.raises(CorpusParseError, match="line 1"):
            ingest_tsv(path)

    def test_tsv_two_docs(self, tmp_path):
        path = self.write(tmp_path, "c.tsv", ["d1\thello world", "d2\tbye world"])
        assert ingest_tsv(path).ids() == ["d1#0", "d2#0"]

    def test_ingest_deterministic(self, tmp_path):
        lines = [json.dumps({"id": f"d{i}", "text": f"doc {i} body text here"}) for i in range(5)]
        path = self.write(tmp_path, "c.jsonl", lines)
        a = ingest_jsonl(path, window=3, stride=2)
        b = ingest_jsonl(path, window=3, stride=2)
        assert [(p.passage_id, p.text) for p in a] == [(p.passage_id, p.text) for p in b]


def test_collection_lookup():
    doc = Document("d", "", "one two three four")
    coll = Collection(split_passages(doc, window=2, stride=2))
    assert "d#0" in coll
    assert coll.get("d#1").token_start == 2
