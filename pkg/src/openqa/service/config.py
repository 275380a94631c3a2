"""TOML service configuration."""

import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..pipeline import ExternalRetrieverSpec


@dataclass
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    cors_origins: list = field(default_factory=list)


@dataclass
class CollectionConfig:
    id: str
    sparse_dir: str | None = None
    dense_dir: str | None = None
    retriever: str = "sparse"
    reader: str = "extractive"
    k_passages: int = 10
    mix_alpha: float = 0.3
    external: str | None = None  # name of an [external.<name>] engine
    generator_endpoint: str | None = None


@dataclass
class ServiceConfig:
    server: ServerConfig
    collections: list
    externals: dict  # name -> ExternalRetrieverSpec
    feedback_path: str


def load_config(path) -> ServiceConfig:
    with open(path, "rb") as f:
        raw = tomllib.load(f)

    server_raw = raw.get("server", {})
    server = ServerConfig(
        host=server_raw.get("host", "127.0.0.1"),
        port=int(server_raw.get("port", 8080)),
        cors_origins=list(server_raw.get("cors_origins", [])),
    )

    externals = {}
    for name, spec in raw.get("external", {}).items():
        try:
            externals[name] = ExternalRetrieverSpec(
                endpoint=spec["endpoint"],
                result_path=spec["result_path"],
                id_field=spec["id_field"],
                text_field=spec["text_field"],
                score_field=spec["score_field"],
            )
        except KeyError as exc:
            raise ValueError(f"external engine {name!r} is missing field {exc}") from exc

    collections = []
    seen = set()
    for entry in raw.get("collection", []):
        if "id" not in entry:
            raise ValueError("every [[collection]] needs an id")
        cid = entry["id"]
        if cid in seen:
            raise ValueError(f"duplicate collection id {cid!r}")
        seen.add(cid)
        cfg = CollectionConfig(
            id=cid,
            sparse_dir=entry.get("sparse_dir"),
            dense_dir=entry.get("dense_dir"),
            retriever=entry.get("retriever", "sparse"),
            reader=entry.get("reader", "extractive"),
            k_passages=int(entry.get("k_passages", 10)),
            mix_alpha=float(entry.get("mix_alpha", 0.3)),
            external=entry.get("external"),
            generator_endpoint=entry.get("generator_endpoint"),
        )
        if not cfg.sparse_dir and not cfg.dense_dir:
            raise ValueError(f"collection {cid!r} configures no index directory")
        if cfg.external and cfg.external not in externals:
            raise ValueError(f"collection {cid!r} references unknown external engine {cfg.external!r}")
        collections.append(cfg)
    if not collections:
        raise ValueError("config defines no collections")

    feedback_path = raw.get("feedback", {}).get("path", "feedback.jsonl")
    return ServiceConfig(server, collections, externals, feedback_path)
