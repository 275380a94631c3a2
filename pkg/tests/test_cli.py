import json

import pytest

from conftest import synthetic_qa_corpus
from openqa.cli import main
from openqa.corpus import save_collection
from openqa.sparse import build_sparse, save_sparse, search_sparse


@pytest.fixture
def tiny_corpus(tmp_path):
    path = tmp_path / "corpus.jsonl"
    docs = [{"id": "d1", "text": "cat sat"}, {"id": "d2", "text": "dog sat"}, {"id": "d3", "text": "cat cat"}]
    path.write_text("\n".join(json.dumps(d) for d in docs) + "\n", encoding="utf-8")
    return path


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestIndexSearch:
    def test_index_then_search(self, tmp_path, tiny_corpus, capsys):
        out_dir = tmp_path / "idx"
        code, _, _ = run(capsys, ["index", "--input", str(tiny_corpus), "--out", str(out_dir), "--mode", "sparse"])
        assert code == 0
        code, out, _ = run(capsys, ["search", "--index", str(out_dir), "--query", "cat", "--k", "5"])
        assert code == 0
        lines = [json.loads(line) for line in out.splitlines()]
        assert lines[0]["passage_id"] == "d3#0"
        assert [l["rank"] for l in lines] == [1, 2]

    def test_search_equals_library(self, tmp_path, tiny_corpus, capsys):
        out_dir = tmp_path / "idx"
        run(capsys, ["index", "--input", str(tiny_corpus), "--out", str(out_dir), "--mode", "sparse"])
        from openqa.storage import load_index

        code, out, _ = run(capsys, ["search", "--index", str(out_dir), "--query", "sat", "--k", "2"])
        want = search_sparse(load_index(out_dir), "sat", 2)
        got = [json.loads(line) for line in out.splitlines()]
        assert got == [
            {"passage_id": r.passage_id, "score": r.score, "rank": r.rank} for r in want
        ]

    def test_dense_index_search(self, tmp_path, tiny_corpus, capsys):
        out_dir = tmp_path / "didx"
        code, _, _ = run(
            capsys,
            ["index", "--input", str(tiny_corpus), "--out", str(out_dir), "--mode", "dense_late", "--dim", "8"],
        )
        assert code == 0
        code, out, _ = run(capsys, ["search", "--index", str(out_dir), "--query", "dog", "--k", "1"])
        assert code == 0
        assert json.loads(out.splitlines()[0])["passage_id"] == "d2#0"

    def test_missing_index_flag_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["search", "--query", "cat"])
        assert err.value.code == 2

    def test_unknown_flag_rejected(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["search", "--index", "x", "--query", "q", "--frobnicate"])
        assert err.value.code == 2

    def test_runtime_error_exit_one(self, tmp_path, capsys):
        code, _, err = run(capsys, ["search", "--index", str(tmp_path / "missing"), "--query", "q"])
        assert code == 1
        assert "error:" in err


class TestAsk:
    def test_ask_prints_answer_set(self, tmp_path, capsys):
        collection, questions = synthetic_qa_corpus(n_docs=10, n_questions=5)
        save_sparse(build_sparse(collection), tmp_path / "sparse")
        config = tmp_path / "svc.toml"
        config.write_text(
            f"""
[feedback]
path = "{tmp_path / 'fb.jsonl'}"

[[collection]]
id = "demo"
sparse_dir = "{tmp_path / 'sparse'}"
""",
            encoding="utf-8",
        )
        question, answer, _ = questions[0]
        code, out, _ = run(
            capsys, ["ask", "--config", str(config), "--collection", "demo", "--question", question]
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["answers"][0]["text"] == answer
        assert payload["question_id"]
        assert payload["passages"][0]["text"]

    def test_unknown_collection(self, tmp_path, capsys):
        collection, _ = synthetic_qa_corpus(n_docs=4, n_questions=1)
        save_sparse(build_sparse(collection), tmp_path / "sparse")
        config = tmp_path / "svc.toml"
        config.write_text(
            f"""
[[collection]]
id = "demo"
sparse_dir = "{tmp_path / 'sparse'}"
""",
            encoding="utf-8",
        )
        code, _, err = run(
            capsys, ["ask", "--config", str(config), "--collection", "nope", "--question", "hi"]
        )
        assert code == 1


class TestEval:
    def test_reader_all_correct(self, tmp_path, capsys):
        rows = [
            {"id": "1", "question": "what is the blorp", "answers": ["blorp"], "passage": "field notes mention blorp today"},
            {"id": "2", "question": "what is the gleep", "answers": ["gleep"], "passage": "gleep appears in the record"},
        ]
        dataset = tmp_path / "reader.jsonl"
        dataset.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
        code, out, _ = run(capsys, ["eval", "--mode", "reader", "--dataset", str(dataset)])
        assert code == 0
        report = json.loads(out)
        assert report["exact_match"] == 100.0
        assert report["f1"] == 100.0
        assert report["n_examples"] == 2

    def test_retrieval(self, tmp_path, tiny_corpus, capsys):
        out_dir = tmp_path / "idx"
        run(capsys, ["index", "--input", str(tiny_corpus), "--out", str(out_dir), "--mode", "sparse"])
        rows = [{"id": "1", "question": "cat", "relevant": ["d3#0"]}]
        dataset = tmp_path / "retrieval.jsonl"
        dataset.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
        code, out, _ = run(
            capsys,
            ["eval", "--mode", "retrieval", "--dataset", str(dataset), "--index", str(out_dir), "--ks", "1,2"],
        )
        assert code == 0
        report = json.loads(out)
        assert report["recall_at_k"] == {"1": 1.0, "2": 1.0}
        assert report["mrr"] == 1.0

    def test_retrieval_requires_index(self, tmp_path, capsys):
        dataset = tmp_path / "d.jsonl"
        dataset.write_text(json.dumps({"id": "1", "question": "q", "relevant": ["x"]}) + "\n", encoding="utf-8")
        code, _, err = run(capsys, ["eval", "--mode", "retrieval", "--dataset", str(dataset)])
        assert code == 1


class TestQgen:
    def test_table_pairs(self, tmp_path, capsys):
        table = tmp_path / "people.csv"
        table.write_text("name,age,city\nann,30,paris\nbob,25,rome\neve,35,paris\n", encoding="utf-8")
        code, out, _ = run(capsys, ["qgen", "--table", str(table), "--n", "4", "--seed", "7"])
        assert code == 0
        pairs = [json.loads(line) for line in out.splitlines()]
        assert len(pairs) == 4
        for pair in pairs:
            assert pair["source"] == "table_sql"
            assert pair["answer"]
            assert pair["provenance"][0] == "people"

    def test_passage_pairs(self, tmp_path, capsys):
        corpus = tmp_path / "docs.jsonl"
        corpus.write_text(
            json.dumps({"id": "d1", "text": "Marie Curie won the Nobel Prize in 1903. She won again in 1911."})
            + "\n",
            encoding="utf-8",
        )
        code, out, _ = run(capsys, ["qgen", "--passages", str(corpus), "--n", "2", "--seed", "0"])
        assert code == 0
        pairs = [json.loads(line) for line in out.splitlines()]
        assert len(pairs) == 2
        assert all("____" in p["question"] for p in pairs)

    def test_requires_source(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["qgen", "--n", "2"])
        assert err.value.code == 2
