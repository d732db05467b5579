"""Exact arithmetic for Brylinski-Deligne covering data of classical groups."""
from __future__ import annotations

from .errors import ArtifactError
from .kernels import COMPILED

__version__ = "0.1.0"

__all__ = ["ArtifactError", "COMPILED", "__version__"]
