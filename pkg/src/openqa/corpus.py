"""Document ingestion, passage windowing, and the tokenization rule shared by all modules."""

import json
from dataclasses import dataclass

from .errors import CorpusDuplicateId, CorpusEmptyDocument, CorpusParseError

DEFAULT_WINDOW = 100
DEFAULT_STRIDE = 50

# Opt-in stopword list (tokenization itself never removes these): question leads,
# auxiliaries, and common function words.
STOPWORDS = frozenset(
    """
    a an the is are was were be been being am do does did can could will would
    should shall may might must has have had having of in on at to from by for
    with about into over under between and or nor not no but if then than so
    as it its this that these those there here he she they them his her their
    we us our you your i me my who whom whose what when where why how which
    """.split()
)


@dataclass(frozen=True)
class Token:
    surface: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    text: str


@dataclass(frozen=True)
class Passage:
    passage_id: str
    doc_id: str
    title: str
    text: str
    token_start: int
    token_count: int


@dataclass(frozen=True)
class RetrievalResult:
    passage_id: str
    score: float
    rank: int


def tokenize(text: str) -> list[Token]:
    """Split text into maximal runs of Unicode alphanumerics, lowercased, with char offsets."""
    tokens = []
    start = None
    for i, ch in enumerate(text):
        if ch.isalnum():
            if start is None:
                start = i
        elif start is not None:
            tokens.append(Token(text[start:i].lower(), start, i))
            start = None
    if start is not None:
        tokens.append(Token(text[start:].lower(), start, len(text)))
    return tokens


def content_terms(text: str) -> set[str]:
    """Distinct non-stopword token surfaces of ``text``."""
    return {t.surface for t in tokenize(text)} - STOPWORDS


class Collection:
    """Immutable ordered set of passages with id lookup."""

    def __init__(self, passages):
        self.passages = list(passages)
        self._by_id = {p.passage_id: p for p in self.passages}

    def __len__(self):
        return len(self.passages)

    def __iter__(self):
        return iter(self.passages)

    def __contains__(self, passage_id):
        return passage_id in self._by_id

    def get(self, passage_id: str) -> Passage:
        return self._by_id[passage_id]

    def ids(self) -> list[str]:
        return [p.passage_id for p in self.passages]


def split_passages(doc: Document, window: int = DEFAULT_WINDOW, stride: int = DEFAULT_STRIDE) -> list[Passage]:
    """Tile a document with token windows starting at 0, stride, 2*stride, ...

    Emission stops with the first window whose end reaches the last token, so the
    final passage may be shorter than ``window``. Passage text is the original
    character span from its first token to its last.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if not 1 <= stride <= window:
        raise ValueError("stride must be in [1, window]")
    tokens = tokenize(doc.text)
    if not tokens:
        raise CorpusEmptyDocument(f"document {doc.doc_id!r} has no tokens")
    total = len(tokens)
    passages = []
    ordinal = 0
    start = 0
    while True:
        end = min(start + window, total)
        span = tokens[start:end]
        passages.append(
            Passage(
                passage_id=f"{doc.doc_id}#{ordinal}",
                doc_id=doc.doc_id,
                title=doc.title,
                text=doc.text[span[0].char_start : span[-1].char_end],
                token_start=start,
                token_count=end - start,
            )
        )
        if start + window >= total:
            break
        start += stride
        ordinal += 1
    return passages


def _collect(documents, window, stride) -> Collection:
    passages = []
    seen = set()
    for lineno, doc in documents:
        if doc.doc_id in seen:
            raise CorpusDuplicateId(f"line {lineno}: duplicate doc id {doc.doc_id!r}")
        seen.add(doc.doc_id)
        passages.extend(split_passages(doc, window, stride))
    return Collection(passages)


def _iter_jsonl_docs(path):
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusParseError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
                raise CorpusParseError(f"line {lineno}: object must have 'id' and 'text' fields")
            yield lineno, Document(str(obj["id"]), str(obj.get("title", "")), str(obj["text"]))


def _iter_tsv_docs(path):
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) < 2:
                raise CorpusParseError(f"line {lineno}: expected id<TAB>text[<TAB>title]")
            title = fields[2] if len(fields) > 2 else ""
            yield lineno, Document(fields[0], title, fields[1])


def ingest_jsonl(path, window: int = DEFAULT_WINDOW, stride: int = DEFAULT_STRIDE) -> Collection:
    """Ingest a JSONL corpus (one ``{"id", "text", "title"?}`` object per line)."""
    return _collect(_iter_jsonl_docs(path), window, stride)


def ingest_tsv(path, window: int = DEFAULT_WINDOW, stride: int = DEFAULT_STRIDE) -> Collection:
    """Ingest a TSV corpus (``id<TAB>text<TAB>title``, title optional, no header)."""
    return _collect(_iter_tsv_docs(path), window, stride)


def save_collection(collection: Collection, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for p in collection:
            rec = {
                "passage_id": p.passage_id,
                "doc_id": p.doc_id,
                "title": p.title,
                "text": p.text,
                "token_start": p.token_start,
                "token_count": p.token_count,
            }
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


def load_collection(path) -> Collection:
    passages = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            passages.append(
                Passage(
                    rec["passage_id"],
                    rec["doc_id"],
                    rec["title"],
                    rec["text"],
                    rec["token_start"],
                    rec["token_count"],
                )
            )
    return Collection(passages)
