"""Open-retrieval question answering: retrievers, readers, pipelines, and a REST service."""

__version__ = "0.1.0"
