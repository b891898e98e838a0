"""Model inference and training sidecar for content-unit evaluation."""

from .service import ServiceConfig, create_app
from .stub import stub_entail, stub_extract, stub_generate, stub_score

__version__ = "0.1.0"
