"""Exact invariant-function searches for rational maps, derivations and D-structures."""

from .errors import (
    FactorizationError,
    HypothesisRefused,
    InvkitError,
    NotAUnitError,
    ParseError,
    PreconditionError,
    ResourceLimitError,
)
from .fields import QQ, PrimeField, field_from_spec
from .polynomial import PolyRing, Polynomial
from .rational import RationalFunction

__version__ = "0.1.0"

__all__ = [
    "QQ",
    "PrimeField",
    "field_from_spec",
    "PolyRing",
    "Polynomial",
    "RationalFunction",
    "InvkitError",
    "ParseError",
    "PreconditionError",
    "NotAUnitError",
    "FactorizationError",
    "HypothesisRefused",
    "ResourceLimitError",
    "__version__",
]
