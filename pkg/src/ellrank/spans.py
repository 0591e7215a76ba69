"""Span-level geometry of zero-dimensional subschemes of the embedded curve.

Everything here reduces to exact row-space computations on jet matrices:
dimensions, membership, strict membership, Grassmann intersections, the
linear system of hyperplane sections through a scheme, and zero divisors of
sections (finite fields, by exhaustive scan over rational points).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from . import series
from .divisor import Divisor
from .embedding import NormalEmbedding, ProjPoint
from .fields import PrimeField, Scalar
from .linalg import (Matrix, in_row_space, rank_profile, reduce_against,
                     row_space_intersection)


class SpanError(ValueError):
    pass


@dataclass(frozen=True)
class SpanIntersection:
    """dim = -1 encodes the empty intersection; a 0-dimensional intersection
    is a single point and carries it as the witness."""

    dim: int
    witness: Optional[ProjPoint]
    basis: Tuple[Tuple[Scalar, ...], ...]


def span_dim(X: NormalEmbedding, Z: Divisor) -> int:
    """Projective dimension of <Z>; -1 for the empty divisor."""
    if Z.is_empty:
        return -1
    return rank_profile(X.jet_matrix(Z)).rank - 1


def point_in_span(X: NormalEmbedding, P: ProjPoint, Z: Divisor) -> bool:
    if Z.is_empty:
        return False
    return in_row_space(X.jet_matrix(Z), P.coords)


def strictly_spanned_by(X: NormalEmbedding, P: ProjPoint, Z: Divisor) -> bool:
    """P in <Z> but in no <Z'> for a proper subscheme Z' of Z.

    Only maximal proper subdivisors are checked; monotonicity of spans makes
    that sufficient.
    """
    if Z.is_empty:
        return False
    if not point_in_span(X, P, Z):
        return False
    return not any(point_in_span(X, P, Zp) for Zp in Z.maximal_subdivisors())


def span_intersection(X: NormalEmbedding, A: Divisor, B: Divisor) -> SpanIntersection:
    basis = row_space_intersection(X.jet_matrix(A), X.jet_matrix(B))
    dim = len(basis) - 1
    witness = ProjPoint.of(X.field, basis[0]) if dim == 0 else None
    return SpanIntersection(dim, witness, basis)


def hyperplanes_through(X: NormalEmbedding, Z: Divisor) -> Tuple[Tuple[Scalar, ...], ...]:
    """Kernel basis: coefficient vectors of sections vanishing on Z.

    Dimension is n+1-deg(Z) whenever deg(Z) <= n; for a hyperplane-section
    divisor (degree n+1, class sum O) it is 1.
    """
    return rank_profile(X.jet_matrix(Z)).kernel


def section_zero_divisor(X: NormalEmbedding, coeffs: Sequence[Scalar]) -> Tuple[Divisor, bool]:
    """Zero divisor of the section sum_i c_i f_i over the rational points.

    Returns (D, complete) where complete means deg(D) = n+1, i.e. every zero
    of the section is rational. Vanishing orders are read from local charts
    to order n+1; an order beyond n+1 is impossible for a nonzero section and
    raises as an internal error. Finite fields only.
    """
    K = X.field
    if not isinstance(K, PrimeField):
        raise SpanError("zero-divisor scan requires a prime field")
    coeffs = tuple(coeffs)
    if len(coeffs) != X.n + 1:
        raise SpanError("coefficient vector has wrong length")
    if all(K.is_zero(c) for c in coeffs):
        raise SpanError("zero section has no zero divisor")
    n_terms = X.n + 2
    pairs = []
    total = 0
    for Q in X.curve.enumerate_points():
        block = X.jet_block(Q, n_terms)
        # value of the section's local series at each jet order
        vals = []
        for row in block:
            s = K.zero
            for c, r in zip(coeffs, row):
                s = K.add(s, K.mul(c, r))
            vals.append(s)
        ord_q = series.order(K, vals)
        if ord_q is None:
            raise SpanError(f"internal error: vanishing order >= {n_terms} at {Q}")
        if ord_q > 0:
            pairs.append((Q, ord_q))
            total += ord_q
    if total > X.n + 1:
        raise SpanError("internal error: zero divisor exceeds the section degree")
    return Divisor.make(pairs), total == X.n + 1


def residual_reducer(X: NormalEmbedding, Z: Divisor):
    """Precompute a fast membership test against <Z> for many candidate points."""
    prof = rank_profile(X.jet_matrix(Z))
    K = X.field

    def member(coords) -> bool:
        res = reduce_against(K, prof.rref, prof.pivots, coords)
        return all(K.is_zero(x) for x in res)

    return member
