"""Euler characteristic tools for H-queries over tuple-independent databases.

Boolean functions on variables 0..k are truth tables (:class:`BoolFun`);
the Euler characteristic decides whether the matching H-query compiles to a
deterministic decomposable circuit, and this package builds such circuits,
the rewrite traces behind them, and the lattice-side quantities.
"""

from .boolfun import BoolFun, euler, parse_function, format_function
from .errors import DomainError, HQueryError, InputError

__version__ = "0.1.0"

__all__ = ["BoolFun", "euler", "parse_function", "format_function",
           "HQueryError", "DomainError", "InputError"]
