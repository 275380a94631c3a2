"""FastAPI orchestrator: ask/retrieve/read endpoints over registered collections, plus feedback."""

import sys
from dataclasses import replace

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from .. import __version__
from ..corpus import Collection, Passage, tokenize
from ..dense import load_dense
from ..errors import (
    BackendUnavailable,
    EmbedderUnavailable,
    EmbedEmptyText,
    GeneratorUnavailable,
    OpenQAError,
)
from ..pipeline import PipelineConfig, compose, default_registry
from ..reader import ReaderParams, extract_answers, lexical_scorer
from ..sparse import corpus_idf, load_sparse
from .config import ServiceConfig, load_config
from .feedback import FeedbackStore
from .schemas import (
    AskRequest,
    AskResponse,
    CollectionsResponse,
    FeedbackRequest,
    FeedbackResponse,
    HealthResponse,
    ReadRequest,
    ReadResponse,
    RetrieveRequest,
    RetrieveResponse,
)

_UNAVAILABLE = (BackendUnavailable, EmbedderUnavailable, GeneratorUnavailable)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class CollectionRuntime:
    """Everything needed to serve one collection: loaded indexes, registry, default pipeline."""

    def __init__(self, cfg, externals):
        self.cfg = cfg
        sparse_index = load_sparse(cfg.sparse_dir) if cfg.sparse_dir else None
        dense_index = load_dense(cfg.dense_dir) if cfg.dense_dir else None
        self.collection = (sparse_index or dense_index).collection
        external_spec = externals[cfg.external] if cfg.external else None
        self.registry = default_registry(
            collection=self.collection,
            sparse_index=sparse_index,
            dense_index=dense_index,
            external_spec=external_spec,
            generator_endpoint=cfg.generator_endpoint,
        )
        self.default_config = PipelineConfig(cfg.retriever, cfg.reader, cfg.k_passages, cfg.mix_alpha)
        self.pipeline = compose(self.default_config, self.registry)

    def pipeline_with(self, top_k_passages=None, max_answers=None):
        if top_k_passages is None and max_answers is None:
            return self.pipeline
        config = self.default_config
        if top_k_passages is not None:
            config = replace(config, k_passages=top_k_passages)
        if max_answers is not None:
            config = replace(config, reader_params=replace(config.reader_params, top_k=max_answers))
        return compose(config, self.registry)


def build_runtimes(config: ServiceConfig) -> dict:
    return {cfg.id: CollectionRuntime(cfg, config.externals) for cfg in config.collections}


def _answer_out(answer) -> dict:
    return {
        "text": answer.text,
        "score": answer.score,
        "kind": answer.kind,
        "passage_id": answer.passage_id,
        "char_start": answer.char_start,
        "char_end": answer.char_end,
    }


def _passage_out(result, passage) -> dict:
    return {
        "passage_id": result.passage_id,
        "score": result.score,
        "rank": result.rank,
        "text": passage.text if passage is not None else "",
        "title": passage.title if passage is not None else "",
    }


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="openqa", version=__version__)
    runtimes = build_runtimes(config)
    store = FeedbackStore(config.feedback_path)
    app.state.runtimes = runtimes
    app.state.feedback = store

    if config.server.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.server.cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"code": exc.code, "message": exc.message})

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"code": "bad_request", "message": str(exc)})

    def runtime_of(collection_id: str) -> CollectionRuntime:
        runtime = runtimes.get(collection_id)
        if runtime is None:
            raise ApiError(404, "unknown_collection", f"no collection {collection_id!r}")
        return runtime

    @app.get("/health", response_model=HealthResponse)
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/collections", response_model=CollectionsResponse)
    def collections():
        infos = [
            {
                "id": runtime.cfg.id,
                "retriever": runtime.cfg.retriever,
                "reader": runtime.cfg.reader,
                "retrievers": sorted(runtime.registry.retrievers),
            }
            for runtime in runtimes.values()
        ]
        return {"collections": infos}

    @app.post("/ask", response_model=AskResponse)
    def ask(body: AskRequest):
        runtime = runtime_of(body.collection)
        if not body.question.strip():
            raise ApiError(400, "bad_request", "question must be non-empty")
        pipeline = runtime.pipeline_with(body.top_k_passages, body.max_answers)
        try:
            result = pipeline.ask(body.question)
        except _UNAVAILABLE as exc:
            raise ApiError(502, "backend_unavailable", str(exc)) from exc
        except EmbedEmptyText as exc:
            raise ApiError(400, "bad_request", str(exc)) from exc
        return {
            "question_id": result.question_id,
            "answers": [_answer_out(a) for a in result.answers],
            "passages": [
                _passage_out(r, p) for r, p in zip(result.passages, result.evidence)
            ],
        }

    @app.post("/retrieve", response_model=RetrieveResponse)
    def retrieve(body: RetrieveRequest):
        runtime = runtime_of(body.collection)
        if not body.query.strip():
            raise ApiError(400, "bad_request", "query must be non-empty")
        if body.k < 1:
            raise ApiError(400, "bad_request", "k must be >= 1")
        backend_name = body.backend or runtime.cfg.retriever
        backend = runtime.registry.retrievers.get(backend_name)
        if backend is None:
            raise ApiError(400, "bad_request", f"backend {backend_name!r} not configured")
        try:
            retrieved = backend.retrieve(body.query, body.k)
        except _UNAVAILABLE as exc:
            raise ApiError(502, "backend_unavailable", str(exc)) from exc
        except EmbedEmptyText as exc:
            raise ApiError(400, "bad_request", str(exc)) from exc
        return {"results": [_passage_out(r, p) for r, p in retrieved]}

    @app.post("/read", response_model=ReadResponse)
    def read(body: ReadRequest):
        if not body.question.strip():
            raise ApiError(400, "bad_request", "question must be non-empty")
        if not body.passages:
            raise ApiError(400, "bad_request", "passages must be non-empty")
        passages = [
            Passage(p.id, p.id, p.title, p.text, 0, max(1, len(tokenize(p.text))))
            for p in body.passages
        ]
        idf = corpus_idf(Collection(passages))
        answers = extract_answers(
            body.question,
            passages,
            lambda question, passage: lexical_scorer(question, passage, idf),
            ReaderParams(),
        )
        return {"answers": [_answer_out(a) for a in answers]}

    @app.post("/feedback", response_model=FeedbackResponse, status_code=201)
    def feedback(body: FeedbackRequest):
        if body.vote not in ("up", "down"):
            raise ApiError(400, "bad_request", f"vote must be 'up' or 'down', not {body.vote!r}")
        try:
            record_id = store.append(
                body.question_id, body.question, body.passage_id, body.answer_text, body.vote
            )
        except OSError as exc:
            raise ApiError(500, "storage_error", str(exc)) from exc
        return {"id": record_id}

    @app.get("/feedback/export")
    def export_feedback():
        lines = list(store.export_lines())
        text = "\n".join(lines) + ("\n" if lines else "")
        return PlainTextResponse(text, media_type="application/x-ndjson")

    return app


def serve(config_path, host: str | None = None, port: int | None = None) -> None:
    """Load config, build the app, and run it; startup failures exit nonzero."""
    import uvicorn

    try:
        config = load_config(config_path)
        app = create_app(config)
    except (OSError, ValueError, OpenQAError) as exc:
        print(f"service startup failed: {exc}", file=sys.stderr)
        raise SystemExit(1)
    uvicorn.run(app, host=host or config.server.host, port=port or config.server.port)
