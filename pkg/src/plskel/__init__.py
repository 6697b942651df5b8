"""Exact computations with monomial polytopes over a divisible ordered group of parameters."""
from .errors import (DependentGenerators, DimensionMismatch, EmptyCell, EmptyDefinable,
                     InsufficientInfRank, NonCompactSource, NonPrimeValuation, NotAnAction,
                     NotCompact, NotInDelta, NotQuantifierFree, PlskelError, PointOutsideSource,
                     RegistryMismatch, ResourceCap, SessionSyntaxError, StrictAtomPresent,
                     UnknownCommand, ValidationError, ZeroComponent)
from .scalars import (GenScalar, LogConst, Ordering, ParamExp, Registry, between, bounds,
                      compare, flat, from_rational, from_sharp_flat, registry, sharp,
                      validate_registry)
from .polytopes import (NEG_INFINITY, AffineForm, Atom, Cell, CellDecomposition, Definable,
                        boundary, decompose, dimension, image_affine, is_empty, member)
from .logic import (GenPoint, evaluate, qe, restriction_ultrafilter, sample_type)
from .plspaces import GroupAction, PLMap, compose, image_pl, orbit, quotient
from .valuations import (ZERO, GaussPoint, LaurentPoly, abhyankar_check, gauss_eval,
                         gauss_sharp, in_standard_skeleton, pushforward_monomial)

__version__ = "0.1.0"

__all__ = [
    "DependentGenerators", "DimensionMismatch", "EmptyCell", "EmptyDefinable",
    "InsufficientInfRank", "NonCompactSource", "NonPrimeValuation", "NotAnAction", "NotCompact",
    "NotInDelta", "NotQuantifierFree", "PlskelError", "PointOutsideSource", "RegistryMismatch",
    "ResourceCap", "SessionSyntaxError", "StrictAtomPresent", "UnknownCommand",
    "ValidationError", "ZeroComponent",
    "GenScalar", "LogConst", "Ordering", "ParamExp", "Registry", "between", "bounds", "compare",
    "flat", "from_rational", "from_sharp_flat", "registry", "sharp", "validate_registry",
    "NEG_INFINITY", "AffineForm", "Atom", "Cell", "CellDecomposition", "Definable", "boundary",
    "decompose", "dimension", "image_affine", "is_empty", "member",
    "GenPoint", "evaluate", "qe", "restriction_ultrafilter", "sample_type",
    "GroupAction", "PLMap", "compose", "image_pl", "orbit", "quotient",
    "ZERO", "GaussPoint", "LaurentPoly", "abhyankar_check", "gauss_eval", "gauss_sharp",
    "in_standard_skeleton", "pushforward_monomial",
]
