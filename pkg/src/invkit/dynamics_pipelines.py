"""End-to-end searches for maps, correspondences, derivations and D-structures."""

from .pipelines import *  # noqa: F401,F403
