"""Short-Weierstrass elliptic curves: group law, point enumeration, local charts.

Curves are y^2 = x^3 + a*x + b over a PrimeField (p >= 5) or the rationals,
so the chord-tangent formulas hold verbatim. Local charts expand x and y as
exact truncated power series in a uniformizer; jets downstream are read off
series coefficients, never derivatives, so multiplicities need no bound on p.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import series
from .fields import Field, FieldError, PrimeField, Scalar


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class CurvePoint:
    """Affine point (x, y) or the origin O at infinity (x = y = None)."""

    x: Optional[Scalar]
    y: Optional[Scalar]

    @property
    def is_origin(self) -> bool:
        return self.x is None

    def __repr__(self):
        return "O" if self.is_origin else f"({self.x},{self.y})"


ORIGIN = CurvePoint(None, None)


def point_sort_key(pt: CurvePoint):
    """Canonical order: O first, then by (x, y)."""
    return (0, 0, 0) if pt.is_origin else (1, pt.x, pt.y)


@dataclass(frozen=True)
class LocalChart:
    """Exact chart at a point: series for x and y in the local uniformizer t.

    At O the series are Laurent with ord(x) = -2, ord(y) = -3; we store the
    cleared units xs = t^clear_x * x(t) and ys = t^clear_y * y(t) instead
    (clear_x = 2, clear_y = 3 at O; both 0 at affine points).
    """

    center: CurvePoint
    uniformizer: str
    n_terms: int
    clear_x: int
    clear_y: int
    xs: Tuple[Scalar, ...]
    ys: Tuple[Scalar, ...]


@dataclass(frozen=True)
class Curve:
    """y^2 = x^3 + a*x + b with nonzero discriminant."""

    field: Field
    a: Scalar
    b: Scalar

    def __post_init__(self):
        K = self.field
        four_a3 = K.mul(K.from_int(4), K.mul(self.a, K.mul(self.a, self.a)))
        disc = K.add(four_a3, K.mul(K.from_int(27), K.mul(self.b, self.b)))
        if K.is_zero(disc):
            raise CurveError("singular curve: 4a^3 + 27b^2 = 0")

    @classmethod
    def make(cls, field: Field, a, b) -> "Curve":
        return cls(field, field.from_int(a) if isinstance(a, int) else a,
                   field.from_int(b) if isinstance(b, int) else b)

    @property
    def origin(self) -> CurvePoint:
        return ORIGIN

    def rhs(self, x):
        K = self.field
        return K.add(K.mul(x, K.mul(x, x)), K.add(K.mul(self.a, x), self.b))

    def contains(self, pt: CurvePoint) -> bool:
        if pt.is_origin:
            return True
        K = self.field
        return K.is_zero(K.sub(K.mul(pt.y, pt.y), self.rhs(pt.x)))

    def point(self, x, y) -> CurvePoint:
        K = self.field
        pt = CurvePoint(K.from_int(x) if isinstance(x, int) else x,
                        K.from_int(y) if isinstance(y, int) else y)
        if not self.contains(pt):
            raise CurveError(f"point {pt} is not on the curve")
        return pt

    def _require(self, *pts):
        for pt in pts:
            if not self.contains(pt):
                raise CurveError(f"point {pt} is not on the curve")

    def negate(self, Q: CurvePoint) -> CurvePoint:
        self._require(Q)
        if Q.is_origin:
            return Q
        return CurvePoint(Q.x, self.field.neg(Q.y))

    def add(self, Q: CurvePoint, R: CurvePoint) -> CurvePoint:
        """Chord-tangent group law with identity O."""
        self._require(Q, R)
        K = self.field
        if Q.is_origin:
            return R
        if R.is_origin:
            return Q
        if Q.x == R.x:
            if K.is_zero(K.add(Q.y, R.y)):
                return ORIGIN
            # doubling; y != 0 here since (x, 0) is its own inverse
            lam = K.div(K.add(K.mul(K.from_int(3), K.mul(Q.x, Q.x)), self.a),
                        K.mul(K.from_int(2), Q.y))
        else:
            lam = K.div(K.sub(R.y, Q.y), K.sub(R.x, Q.x))
        x3 = K.sub(K.sub(K.mul(lam, lam), Q.x), R.x)
        y3 = K.sub(K.mul(lam, K.sub(Q.x, x3)), Q.y)
        return CurvePoint(x3, y3)

    def scalar_mult(self, m: int, Q: CurvePoint) -> CurvePoint:
        """[m]Q by double-and-add; negative m uses the inverse."""
        if m < 0:
            return self.scalar_mult(-m, self.negate(Q))
        acc = ORIGIN
        add_in = Q
        while m:
            if m & 1:
                acc = self.add(acc, add_in)
            m >>= 1
            if m:
                add_in = self.add(add_in, add_in)
        return acc

    def divisor_class_sum(self, pairs: Sequence[Tuple[CurvePoint, int]]) -> CurvePoint:
        """Group-law sum (+)_i [m_i]Q_i; O iff the divisor lies in |deg * O|."""
        acc = ORIGIN
        for pt, mult in pairs:
            if mult < 1:
                raise CurveError("multiplicities must be >= 1")
            acc = self.add(acc, self.scalar_mult(mult, pt))
        return acc

    def enumerate_points(self) -> List[CurvePoint]:
        """All rational points including O, in canonical order. Prime fields only."""
        K = self.field
        if not isinstance(K, PrimeField):
            raise CurveError("point enumeration requires a prime field")
        p = K.p
        roots_of = {}
        for y in range(p):
            roots_of.setdefault(y * y % p, []).append(y)
        pts = [ORIGIN]
        for x in range(p):
            for y in sorted(roots_of.get(self.rhs(x), ())):
                pts.append(CurvePoint(x, y))
        return pts

    def two_division(self, target: CurvePoint) -> List[CurvePoint]:
        """All rational C with [2]C = target, by exhaustive scan (size <= 4)."""
        return [C for C in self.enumerate_points() if self.scalar_mult(2, C) == target]

    def random_point(self, rng: random.Random, points: Optional[List[CurvePoint]] = None) -> CurvePoint:
        pts = points if points is not None else self.enumerate_points()
        return pts[rng.randrange(len(pts))]

    def local_chart(self, Q: CurvePoint, n_terms: int) -> LocalChart:
        """Exact expansion of (x, y) at Q to n_terms coefficients.

        Uniformizers: t = x - x0 when y0 != 0, t = y at 2-torsion points, and
        t = x/y at O. Expansions come from fixed-point iteration on the curve
        equation, so they are exact in any characteristic != 2, 3.
        """
        if n_terms < 1:
            raise CurveError("n_terms must be >= 1")
        self._require(Q)
        K = self.field
        N = n_terms
        if Q.is_origin:
            # s := 1/y satisfies s = t^3 + a t s^2 + b s^3 with t = x/y.
            # Work with u := s / t^3 (a unit) and set U = 1/u; then
            # t^2 x = t^3 y = U, so one unit series carries both coordinates.
            work = N + 7  # s is known mod t^(work) after enough passes
            t = [K.zero] * work
            if work > 1:
                t[1] = K.one
            t = tuple(t)
            s = series.constant(K, K.zero, work)
            t3 = series.mul(K, series.mul(K, t, t), t)
            for _ in range(work):
                s2 = series.mul(K, s, s)
                s3 = series.mul(K, s2, s)
                s = series.add(K, t3,
                               series.add(K, series.scale(K, self.a, series.mul(K, t, s2)),
                                          series.scale(K, self.b, s3)))
            u = tuple(s[3:3 + N])  # s / t^3
            if K.is_zero(u[0]):
                raise CurveError("chart iteration failed at O")
            U = series.inverse(K, u)
            return LocalChart(Q, "x/y", N, 2, 3, U, U)
        x0, y0 = Q.x, Q.y
        if not K.is_zero(y0):
            # t = x - x0: x is exact, y = y0 + e with e = (f(x) - y0^2 - e^2)/(2 y0)
            xs = [x0] + [K.zero] * (N - 1)
            if N > 1:
                xs[1] = K.one
            xs = tuple(xs)
            fx = self._rhs_series(xs)
            c = K.inv(K.mul(K.from_int(2), y0))
            target = series.sub(K, fx, series.constant(K, K.mul(y0, y0), N))
            e = series.constant(K, K.zero, N)
            for _ in range(N):
                e = series.scale(K, c, series.sub(K, target, series.mul(K, e, e)))
            ys = series.add(K, series.constant(K, y0, N), e)
            return LocalChart(Q, "x-x0", N, 0, 0, xs, ys)
        # 2-torsion: t = y, solve f(x0 + d) = t^2 for d (f'(x0) != 0 by smoothness)
        ys = [K.zero] * N
        if N > 1:
            ys[1] = K.one
        ys = tuple(ys)
        t2 = series.mul(K, ys, ys)
        c1 = K.add(K.mul(K.from_int(3), K.mul(x0, x0)), self.a)  # f'(x0)
        c2 = K.mul(K.from_int(3), x0)
        c1_inv = K.inv(c1)
        d = series.constant(K, K.zero, N)
        for _ in range(N):
            d2 = series.mul(K, d, d)
            d3 = series.mul(K, d2, d)
            rhs = series.sub(K, series.sub(K, t2, series.scale(K, c2, d2)), d3)
            d = series.scale(K, c1_inv, rhs)
        xs = series.add(K, series.constant(K, x0, N), d)
        return LocalChart(Q, "y", N, 0, 0, xs, ys)

    def _rhs_series(self, xs):
        K = self.field
        x3 = series.mul(K, series.mul(K, xs, xs), xs)
        ax = series.scale(K, self.a, xs)
        return series.add(K, x3, series.add(K, ax, series.constant(K, self.b, len(xs))))

    def chart_identity_defect(self, chart: LocalChart):
        """Series of the curve identity in the chart; all-zero iff the chart is exact.

        At O the identity is cleared by t^6: ys^2 - xs^3 - a t^4 xs - b t^6.
        """
        K = self.field
        if chart.center.is_origin:
            y2 = series.mul(K, chart.ys, chart.ys)
            x3 = series.mul(K, series.mul(K, chart.xs, chart.xs), chart.xs)
            ax = series.shift(K, series.scale(K, self.a, chart.xs), 4)
            bt = series.shift(K, series.constant(K, self.b, chart.n_terms), 6)
            return series.sub(K, series.sub(K, series.sub(K, y2, x3), ax), bt)
        y2 = series.mul(K, chart.ys, chart.ys)
        return series.sub(K, y2, self._rhs_series(chart.xs))
