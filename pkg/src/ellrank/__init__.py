"""Exact rank-stratification laboratory for linearly normal elliptic curves.

Core layers: exact fields and dense linear algebra, the curve group law and
local charts, the degree-(n+1) embedding with jet matrices, span geometry,
rank certificates and searches, and seeded verification experiments.
"""

from .curve import Curve, CurvePoint, ORIGIN
from .divisor import Divisor, divisor_lattice, format_divisor, parse_divisor
from .embedding import NormalEmbedding, ProjPoint, basis_functions
from .fields import PrimeField, RationalField, QQ
from .linalg import Matrix, rank_profile, in_row_space, row_space_intersection

__version__ = "0.1.0"

__all__ = [
    "Curve", "CurvePoint", "ORIGIN",
    "Divisor", "divisor_lattice", "format_divisor", "parse_divisor",
    "NormalEmbedding", "ProjPoint", "basis_functions",
    "PrimeField", "RationalField", "QQ",
    "Matrix", "rank_profile", "in_row_space", "row_space_intersection",
    "__version__",
]
