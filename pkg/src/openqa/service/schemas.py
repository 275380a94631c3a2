"""Pydantic request/response models for the REST endpoints."""

from pydantic import BaseModel


class AskRequest(BaseModel):
    question: str
    collection: str
    top_k_passages: int | None = None
    max_answers: int | None = None


class RetrieveRequest(BaseModel):
    query: str
    collection: str
    k: int = 10
    backend: str | None = None


class PassageIn(BaseModel):
    id: str
    text: str
    title: str = ""


class ReadRequest(BaseModel):
    question: str
    passages: list[PassageIn]


class FeedbackRequest(BaseModel):
    question_id: str
    question: str
    passage_id: str
    answer_text: str
    vote: str


class AnswerOut(BaseModel):
    text: str
    score: float
    kind: str
    passage_id: str
    char_start: int | None = None
    char_end: int | None = None


class PassageOut(BaseModel):
    passage_id: str
    score: float
    rank: int
    text: str
    title: str


class AskResponse(BaseModel):
    question_id: str
    answers: list[AnswerOut]
    passages: list[PassageOut]


class RetrieveResponse(BaseModel):
    results: list[PassageOut]


class ReadResponse(BaseModel):
    answers: list[AnswerOut]


class FeedbackResponse(BaseModel):
    id: str


class HealthResponse(BaseModel):
    status: str
    version: str


class CollectionInfo(BaseModel):
    id: str
    retriever: str
    reader: str
    retrievers: list[str]


class CollectionsResponse(BaseModel):
    collections: list[CollectionInfo]
