"""Primitive recursive descriptions, algorithmic universes, and the
partition/stabilizer correspondence.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its public surface.
"""

from ._core import (
    ArityMismatch,
    BudgetExceeded,
    CapacityError,
    Error,
    ParseError,
    PathError,
    SpecError,
    Term,
    TypeError,
    check,
    closure,
    comp,
    diagonal,
    evaluate,
    fingerprint,
    fragment,
    galois,
    identity,
    lattice,
    normalize,
    pair,
    parse,
    product,
    proj,
    rec,
    rule_soundness,
    s,
    twist,
    universes,
    z,
)

__all__ = [
    "ArityMismatch",
    "BudgetExceeded",
    "CapacityError",
    "Error",
    "ParseError",
    "PathError",
    "SpecError",
    "Term",
    "TypeError",
    "check",
    "closure",
    "comp",
    "diagonal",
    "evaluate",
    "fingerprint",
    "fragment",
    "galois",
    "identity",
    "lattice",
    "normalize",
    "pair",
    "parse",
    "product",
    "proj",
    "rec",
    "rule_soundness",
    "s",
    "twist",
    "universes",
    "z",
]
