"""Dense single-vector retrieval and late-interaction (MaxSim) scoring.

Search is exact and exhaustive: every stored vector is scored. Embedders are
pluggable; the built-in hash embedder is fully deterministic and exists so that
retrieval behaviour can be tested without a trained encoder. Stored vectors are
rounded through float32 at build time so the on-disk format loses nothing.
"""

import os
import struct
from dataclasses import dataclass
from functools import lru_cache

import httpx
import numpy as np

from .corpus import Collection, RetrievalResult, load_collection, save_collection, tokenize
from .errors import (
    EmbedEmptyText,
    EmbedderDimensionMismatch,
    EmbedderUnavailable,
    IndexCorrupt,
    IndexEmptyCollection,
    IndexModeMismatch,
    IndexUnknownPassage,
)
from .storage import read_manifest, write_manifest

VECTORS_NAME = "vectors.bin"
COLLECTION_NAME = "collection.jsonl"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = (1 << 64) - 1


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _U64
    return h


@lru_cache(maxsize=1 << 16)
def _token_row(surface: str, dim: int):
    prefix = surface.encode("utf-8") + b"#"
    row = np.empty(dim)
    for i in range(dim):
        h = _fnv1a64(prefix + str(i).encode("ascii"))
        row[i] = (h % 2001) / 1000.0 - 1.0
    norm = np.linalg.norm(row)
    if norm > 0.0:
        row = row / norm
    row.flags.writeable = False
    return row


def hash_embed(text: str, dim: int):
    """Token matrix for ``text``: one L2-normalized FNV-1a-derived row per token."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    surfaces = [t.surface for t in tokenize(text)]
    if not surfaces:
        raise EmbedEmptyText(f"no tokens in {text!r}")
    return np.stack([_token_row(s, dim) for s in surfaces])


def pool(matrix):
    """L2-normalized sum of the token rows."""
    vec = matrix.sum(axis=0)
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0.0 else vec


@dataclass(frozen=True)
class EmbedderSpec:
    kind: str  # "hash-test" or "remote"
    dim: int
    endpoint: str | None = None


class HashEmbedder:
    """Deterministic lexical-hash embedder; query and passage sides are identical."""

    def __init__(self, dim: int):
        self.dim = dim

    def token_matrices(self, texts, mode):
        return [hash_embed(text, self.dim) for text in texts]

    def pooled_vectors(self, texts, mode):
        return np.stack([pool(hash_embed(text, self.dim)) for text in texts])


class RemoteEmbedder:
    """Client for an external encoder service speaking the /embed protocol."""

    def __init__(self, endpoint: str, dim: int, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.dim = dim
        self.timeout = timeout

    def _post(self, texts, mode, granularity):
        body = {"texts": list(texts), "mode": mode, "granularity": granularity}
        try:
            resp = httpx.post(self.endpoint + "/embed", json=body, timeout=self.timeout)
            resp.raise_for_status()
            data = resp.json()
        except (httpx.HTTPError, ValueError) as exc:
            raise EmbedderUnavailable(f"{self.endpoint}: {exc}") from exc
        if data.get("dim") != self.dim:
            raise EmbedderDimensionMismatch(f"endpoint returned dim={data.get('dim')}, expected {self.dim}")
        return data

    def token_matrices(self, texts, mode):
        data = self._post(texts, mode, "tokens")
        matrices = [np.asarray(m, dtype=np.float64) for m in data["matrices"]]
        for m in matrices:
            if m.ndim != 2 or m.shape[1] != self.dim or m.shape[0] < 1:
                raise EmbedderDimensionMismatch(f"bad matrix shape {m.shape} from {self.endpoint}")
        return matrices

    def pooled_vectors(self, texts, mode):
        data = self._post(texts, mode, "pooled")
        vectors = np.asarray(data["vectors"], dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[1] != self.dim:
            raise EmbedderDimensionMismatch(f"bad vector shape {vectors.shape} from {self.endpoint}")
        return vectors


def make_embedder(spec: EmbedderSpec):
    if spec.kind == "hash-test":
        return HashEmbedder(spec.dim)
    if spec.kind == "remote":
        if not spec.endpoint:
            raise ValueError("remote embedder needs an endpoint")
        return RemoteEmbedder(spec.endpoint, spec.dim)
    raise ValueError(f"unknown embedder kind {spec.kind!r}")


def _quantize(array):
    # float32 is the storage precision; rounding at build keeps save/load lossless.
    return np.asarray(array, dtype=np.float32).astype(np.float64)


class DenseIndex:
    """Immutable store of pooled vectors or token matrices for one collection."""

    def __init__(self, collection, spec, mode, pooled=None, matrices=None):
        self.collection = collection
        self.spec = spec
        self.mode = mode
        self.ids = collection.ids()
        self.pooled = pooled  # (N, dim) array, pooled mode
        self.matrices = matrices  # list of (tokens, dim) arrays, late mode
        self._embedder = make_embedder(spec)
        self._index_of = {pid: i for i, pid in enumerate(self.ids)}

    @property
    def dim(self) -> int:
        return self.spec.dim

    def query_vector(self, query: str):
        return self._embedder.pooled_vectors([query], "query")[0]

    def query_matrix(self, query: str):
        return self._embedder.token_matrices([query], "query")[0]


def build_dense(collection: Collection, embedder: EmbedderSpec, mode: str) -> DenseIndex:
    if len(collection) == 0:
        raise IndexEmptyCollection("cannot build an index over zero passages")
    if mode not in ("pooled", "late"):
        raise ValueError(f"unknown dense mode {mode!r}")
    enc = make_embedder(embedder)
    texts = [p.text for p in collection]
    if mode == "pooled":
        pooled = _quantize(enc.pooled_vectors(texts, "passage"))
        return DenseIndex(collection, embedder, mode, pooled=pooled)
    matrices = [_quantize(m) for m in enc.token_matrices(texts, "passage")]
    return DenseIndex(collection, embedder, mode, matrices=matrices)


def maxsim(q_matrix, d_matrix) -> float:
    """Late-interaction score: sum over query rows of the best dot product in the document."""
    q = np.ascontiguousarray(q_matrix, dtype=np.float64)
    d = np.ascontiguousarray(d_matrix, dtype=np.float64)
    if q.shape[1] != d.shape[1]:
        raise EmbedderDimensionMismatch(f"query dim {q.shape[1]} vs document dim {d.shape[1]}")
    # einsum keeps each pairwise dot independent of the matrix shapes, so equal
    # token pairs score bitwise-equal and the passage-id tie rule stays stable.
    sims = np.einsum("id,jd->ij", q, d)
    return float(sims.max(axis=1).sum())


def _rank(scored, k):
    ranked = sorted(scored, key=lambda item: (-item[1], item[0]))[:k]
    return [RetrievalResult(pid, score, rank) for rank, (pid, score) in enumerate(ranked, start=1)]


def search_pooled(index: DenseIndex, query: str, k: int) -> list[RetrievalResult]:
    """Exact top-k by dot product against every stored pooled vector."""
    if index.mode != "pooled":
        raise IndexModeMismatch(f"index mode is {index.mode!r}, not 'pooled'")
    if k < 1:
        raise ValueError("k must be >= 1")
    q = index.query_vector(query)
    if q.shape[0] != index.dim:
        raise EmbedderDimensionMismatch(f"query dim {q.shape[0]} vs index dim {index.dim}")
    scores = np.einsum("nd,d->n", index.pooled, q)
    return _rank(zip(index.ids, scores.tolist()), k)


def search_late(index: DenseIndex, query: str, k: int, candidates=None) -> list[RetrievalResult]:
    """MaxSim top-k over all passages, or over ``candidates`` to rerank a prior stage."""
    if index.mode != "late":
        raise IndexModeMismatch(f"index mode is {index.mode!r}, not 'late'")
    if k < 1:
        raise ValueError("k must be >= 1")
    if candidates is None:
        pids = index.ids
    else:
        pids = list(candidates)
        for pid in pids:
            if pid not in index._index_of:
                raise IndexUnknownPassage(pid)
        if not pids:
            return []
    q = index.query_matrix(query)
    scored = [(pid, maxsim(q, index.matrices[index._index_of[pid]])) for pid in pids]
    return _rank(scored, k)


def save_dense(index: DenseIndex, directory) -> None:
    os.makedirs(directory, exist_ok=True)
    entries = {
        "type": "dense",
        "mode": index.mode,
        "dim": index.dim,
        "embedder": index.spec.kind,
    }
    if index.spec.endpoint:
        entries["endpoint"] = index.spec.endpoint
    write_manifest(directory, entries)
    with open(os.path.join(directory, VECTORS_NAME), "wb") as f:
        for i, pid in enumerate(index.ids):
            array = index.pooled[i] if index.mode == "pooled" else index.matrices[i]
            flat = np.asarray(array, dtype=np.float32).reshape(-1)
            pid_bytes = pid.encode("utf-8")
            f.write(struct.pack("<I", len(pid_bytes)))
            f.write(pid_bytes)
            f.write(struct.pack("<I", flat.size))
            f.write(flat.tobytes())
    save_collection(index.collection, os.path.join(directory, COLLECTION_NAME))


def _read_exact(f, n, directory):
    data = f.read(n)
    if len(data) != n:
        raise IndexCorrupt(f"truncated vector store in {directory}")
    return data


def load_dense(directory) -> DenseIndex:
    entries = read_manifest(directory)
    if entries.get("type") != "dense":
        raise IndexCorrupt(f"{directory} is not a dense index (type={entries.get('type')!r})")
    try:
        mode = entries["mode"]
        dim = int(entries["dim"])
        spec = EmbedderSpec(entries["embedder"], dim, entries.get("endpoint"))
    except (KeyError, ValueError) as exc:
        raise IndexCorrupt(f"bad manifest in {directory}: {exc}") from exc
    vectors_path = os.path.join(directory, VECTORS_NAME)
    collection_path = os.path.join(directory, COLLECTION_NAME)
    if not os.path.isfile(vectors_path) or not os.path.isfile(collection_path):
        raise IndexCorrupt(f"missing index files in {directory}")
    records = {}
    with open(vectors_path, "rb") as f:
        while True:
            head = f.read(4)
            if not head:
                break
            if len(head) != 4:
                raise IndexCorrupt(f"truncated vector store in {directory}")
            (pid_len,) = struct.unpack("<I", head)
            pid = _read_exact(f, pid_len, directory).decode("utf-8")
            (count,) = struct.unpack("<I", _read_exact(f, 4, directory))
            flat = np.frombuffer(_read_exact(f, 4 * count, directory), dtype="<f4").astype(np.float64)
            if count % dim != 0:
                raise IndexCorrupt(f"vector length {count} not a multiple of dim {dim}")
            records[pid] = flat.reshape(count // dim, dim)
    collection = load_collection(collection_path)
    missing = [p.passage_id for p in collection if p.passage_id not in records]
    if missing:
        raise IndexCorrupt(f"vector store lacks records for {missing[:3]}")
    if mode == "pooled":
        pooled = np.stack([records[pid][0] for pid in collection.ids()])
        return DenseIndex(collection, spec, mode, pooled=pooled)
    if mode == "late":
        matrices = [records[pid] for pid in collection.ids()]
        return DenseIndex(collection, spec, mode, matrices=matrices)
    raise IndexCorrupt(f"unknown dense mode {mode!r}")
