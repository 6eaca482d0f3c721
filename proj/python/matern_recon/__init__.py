"""Implicit surface reconstruction with Matern kernels."""

from ._core import *  # noqa: F401,F403
from ._core import MaternError, KernelSpec, reconstruct

__all__ = [name for name in dir() if not name.startswith("_")]
