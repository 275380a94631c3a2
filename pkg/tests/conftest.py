import json
import random
import threading
from contextlib import contextmanager
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from openqa.corpus import Collection, Document, split_passages


def synthetic_qa_corpus(n_docs=50, n_questions=20, seed=1234):
    """Corpus where each question's literal answer token occurs in exactly one doc.

    The answer term is unique to its doc; each question also shares two context
    terms with that doc (each duplicated into one other doc, so the answer term
    keeps the strictly highest idf). Returns (collection, questions) with
    questions as (question, answer, doc_id) tuples; every doc fits one window.
    """
    rng = random.Random(seed)
    filler = [f"w{i}" for i in range(100)]
    docs = [[rng.choice(filler) for _ in range(rng.randrange(12, 20))] for _ in range(n_docs)]
    questions = []
    for i in range(n_questions):
        answer, gate, sector = f"quark{i}", f"gate{i}", f"sector{i}"
        for term in (answer, gate, sector):
            docs[i].insert(rng.randrange(len(docs[i]) + 1), term)
        for term in (gate, sector):
            other = rng.choice([j for j in range(n_docs) if j != i])
            docs[other].insert(rng.randrange(len(docs[other]) + 1), term)
        questions.append((f"what is the {answer} near {gate} in {sector}", answer, f"doc{i:02d}"))
    passages = []
    for i, words in enumerate(docs):
        passages.extend(split_passages(Document(f"doc{i:02d}", f"Title {i}", " ".join(words))))
    return Collection(passages), questions


@contextmanager
def http_stub(handler):
    """Serve ``handler(path, body_dict) -> (status, payload_dict)`` on a local port."""
    captured = []

    class Stub(BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            body = json.loads(self.rfile.read(length) or b"{}")
            captured.append((self.path, body))
            status, payload = handler(self.path, body)
            data = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def log_message(self, *args):
            pass

    server = ThreadingHTTPServer(("127.0.0.1", 0), Stub)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_port}", captured
    finally:
        server.shutdown()
        thread.join()
