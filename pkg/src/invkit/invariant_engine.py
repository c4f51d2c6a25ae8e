"""Unit decompositions, multiplicative kernels and invariant certificates."""

from .invariants import *  # noqa: F401,F403
