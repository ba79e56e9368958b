from .app import create_app
from .provider import MockProvider

__all__ = ["create_app", "MockProvider"]
