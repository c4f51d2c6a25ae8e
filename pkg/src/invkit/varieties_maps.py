"""Presented charts, rational maps, hypersurfaces and their pullbacks."""

from .varieties import *  # noqa: F401,F403
