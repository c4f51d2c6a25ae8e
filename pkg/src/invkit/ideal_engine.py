"""Groebner bases, normal forms, elimination and saturation."""

from .groebner import *  # noqa: F401,F403
