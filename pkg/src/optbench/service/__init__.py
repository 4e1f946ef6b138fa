"""HTTP facade for the workbench."""

from .app import annotate_paths, create_app
from .session import ApiSession, BenchJob

__all__ = ["ApiSession", "BenchJob", "annotate_paths", "create_app"]
