"""Hierarchical task network planning with a state-based and a plan-based engine."""
from ._kernels import BACKEND
from .core import *  # noqa: F401,F403

__version__ = "0.1.0"
