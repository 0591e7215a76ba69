"""The complete degree-(n+1) embedding X in P^n and jet matrices of divisors.

The coordinate functions are the monomial basis {x^i y^j : j in {0,1},
2i + 3j <= n+1} of the space of functions with pole only at O of order at
most n+1, sorted by pole order (0, 2, 3, ..., n+1). This pins the embedding
of O to [0: ... :0:1] and makes every report deterministic.

The jet matrix of a divisor Z has, for each (Q, m) in Z, the m rows of local
series coefficients of the coordinate functions at Q; its row space is the
linear span <Z>. Rows are series coefficients, never derivatives, so
multiplicities carry no characteristic restriction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from . import series
from .curve import Curve, CurvePoint, LocalChart
from .divisor import Divisor
from .fields import Scalar
from .linalg import Matrix

GUARD_TERMS = 2  # chart truncation beyond the needed jet order


class EmbeddingError(ValueError):
    pass


def basis_functions(n: int) -> Tuple[Tuple[int, int], ...]:
    """Monomial exponents (i, j) for x^i y^j, sorted by pole order 2i + 3j.

    There are exactly n+1 of them and the pole orders are {0, 2, 3, ..., n+1}:
    1 is the only gap at O.
    """
    if n < 3:
        raise EmbeddingError("need n >= 3")
    monos = [(i, j) for j in (0, 1) for i in range((n + 1 - 3 * j) // 2 + 1)
             if 2 * i + 3 * j <= n + 1]
    monos.sort(key=lambda ij: 2 * ij[0] + 3 * ij[1])
    return tuple(monos)


@dataclass(frozen=True)
class ProjPoint:
    """Point of P^n in normalized form (first nonzero coordinate scaled to 1)."""

    coords: Tuple[Scalar, ...]

    @classmethod
    def of(cls, field, coords: Sequence[Scalar]) -> "ProjPoint":
        coords = tuple(coords)
        lead = None
        for c in coords:
            if not field.is_zero(c):
                lead = c
                break
        if lead is None:
            raise EmbeddingError("projective point needs a nonzero coordinate")
        inv = field.inv(lead)
        return cls(tuple(field.mul(inv, c) for c in coords))

    def __repr__(self):
        return "[" + ":".join(str(c) for c in self.coords) + "]"


class NormalEmbedding:
    """X in P^n embedded by the complete system of degree n+1 at O.

    Instances are immutable in all observable state; the internal jet block
    cache only memoizes pure computations, so sharing across threads is safe
    (a lost race recomputes identical data).
    """

    def __init__(self, curve: Curve, n: int):
        if n < 3:
            raise EmbeddingError("need n >= 3")
        self.curve = curve
        self.n = n
        self.basis = basis_functions(n)
        self.pole_orders = tuple(2 * i + 3 * j for i, j in self.basis)
        self._jet_blocks: Dict[Tuple[CurvePoint, int], Tuple[Tuple[Scalar, ...], ...]] = {}
        self._embed_cache: Dict[CurvePoint, ProjPoint] = {}

    @property
    def beta(self) -> int:
        """Largest d with every degree-<=d subscheme linearly independent."""
        return self.n

    @property
    def field(self):
        return self.curve.field

    @property
    def dim_sections(self) -> int:
        return self.n + 1

    def _monomial_rows(self, chart: LocalChart, mult: int) -> Tuple[Tuple[Scalar, ...], ...]:
        """Rows l = 0..mult-1 of coefficients of t^shift * f_i at the chart center."""
        K = self.field
        n_terms = chart.n_terms
        at_origin = chart.center.is_origin
        shift_total = self.n + 1 if at_origin else 0
        # powers of the cleared coordinate series
        max_i = max(i for i, _ in self.basis)
        xpow = [series.constant(K, K.one, n_terms)]
        for _ in range(max_i):
            xpow.append(series.mul(K, xpow[-1], chart.xs))
        cols = []
        for (i, j), pole in zip(self.basis, self.pole_orders):
            f = xpow[i]
            if j:
                f = series.mul(K, f, chart.ys)
            if at_origin:
                # t^(n+1) x^i y^j = t^(n+1-pole) * xs^i ys^j
                f = series.shift(K, f, shift_total - pole)
            cols.append(f)
        return tuple(tuple(col[l] for col in cols) for l in range(mult))

    def jet_block(self, Q: CurvePoint, mult: int) -> Tuple[Tuple[Scalar, ...], ...]:
        key = (Q, mult)
        block = self._jet_blocks.get(key)
        if block is None:
            chart = self.curve.local_chart(Q, mult + GUARD_TERMS)
            block = self._monomial_rows(chart, mult)
            self._jet_blocks[key] = block
        return block

    def embed_point(self, Q: CurvePoint) -> ProjPoint:
        """Image of Q under the embedding; O maps to [0: ... :0:1]."""
        pt = self._embed_cache.get(Q)
        if pt is None:
            if not self.curve.contains(Q):
                raise EmbeddingError(f"point {Q} is not on the curve")
            pt = ProjPoint.of(self.field, self.jet_block(Q, 1)[0])
            self._embed_cache[Q] = pt
        return pt

    def jet_matrix(self, Z: Divisor) -> Matrix:
        """deg(Z) x (n+1) matrix whose row space is the span <Z>."""
        rows: List[Tuple[Scalar, ...]] = []
        for pt, m in Z.pairs:
            if not self.curve.contains(pt):
                raise EmbeddingError(f"support point {pt} is not on the curve")
            rows.extend(self.jet_block(pt, m))
        return Matrix.from_rows(self.field, rows, ncols=self.n + 1)

    def in_O1(self, Z: Divisor) -> bool:
        """True iff Z is a hyperplane-section divisor: degree n+1 and class sum O."""
        if Z.degree != self.n + 1:
            return False
        return self.curve.divisor_class_sum(Z.pairs).is_origin
