"""REST orchestrator: FastAPI app, service config, and the feedback store."""

from .app import create_app, serve
from .config import ServiceConfig, load_config

__all__ = ["create_app", "serve", "ServiceConfig", "load_config"]
