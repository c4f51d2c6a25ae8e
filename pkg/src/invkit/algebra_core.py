"""Fields, polynomials, the expression grammar, rational functions, gcds and factor splitting."""

from .factor import *  # noqa: F401,F403
from .fields import *  # noqa: F401,F403
from .gcd import *  # noqa: F401,F403
from .lattice import *  # noqa: F401,F403
from .parsing import *  # noqa: F401,F403
from .polynomial import *  # noqa: F401,F403
from .rational import *  # noqa: F401,F403
