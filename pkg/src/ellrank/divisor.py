"""Effective divisors on a curve and their text grammar.

A Divisor is a canonically sorted tuple of (point, multiplicity) pairs with
distinct support; it stands for a zero-dimensional subscheme of the curve,
where multiplicity m at Q imposes vanishing of the first m local series
coefficients. The text grammar is `term (+ term)*` with term = `[k*](x,y)` or
`[k*]O`, and canonical printing always writes explicit multiplicities.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple

from .curve import Curve, CurvePoint, ORIGIN, point_sort_key


class DivisorError(ValueError):
    pass


class DivisorSyntaxError(DivisorError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


@dataclass(frozen=True)
class Divisor:
    pairs: Tuple[Tuple[CurvePoint, int], ...]

    @classmethod
    def make(cls, pairs: Iterable[Tuple[CurvePoint, int]],
             curve: Optional[Curve] = None) -> "Divisor":
        """Canonicalize (merge duplicates, sort) and optionally validate support."""
        acc = {}
        for pt, mult in pairs:
            if mult < 1:
                raise DivisorError("multiplicities must be >= 1")
            if curve is not None and not curve.contains(pt):
                raise DivisorError(f"support point {pt} is not on the curve")
            acc[pt] = acc.get(pt, 0) + mult
        ordered = tuple(sorted(acc.items(), key=lambda kv: point_sort_key(kv[0])))
        return cls(ordered)

    @classmethod
    def of_points(cls, points: Iterable[CurvePoint], curve: Optional[Curve] = None) -> "Divisor":
        return cls.make([(pt, 1) for pt in points], curve)

    @classmethod
    def empty(cls) -> "Divisor":
        return cls(())

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.pairs)

    @property
    def is_reduced(self) -> bool:
        return all(m == 1 for _, m in self.pairs)

    @property
    def is_empty(self) -> bool:
        return not self.pairs

    def support(self) -> Tuple[CurvePoint, ...]:
        return tuple(pt for pt, _ in self.pairs)

    def mult_of(self, pt: CurvePoint) -> int:
        for q, m in self.pairs:
            if q == pt:
                return m
        return 0

    def contains(self, other: "Divisor") -> bool:
        return all(self.mult_of(pt) >= m for pt, m in other.pairs)

    def add(self, other: "Divisor") -> "Divisor":
        return Divisor.make(self.pairs + other.pairs)

    def union(self, other: "Divisor") -> "Divisor":
        pts = set(self.support()) | set(other.support())
        return Divisor.make([(pt, max(self.mult_of(pt), other.mult_of(pt))) for pt in pts])

    def intersection(self, other: "Divisor") -> "Divisor":
        out = []
        for pt, m in self.pairs:
            k = min(m, other.mult_of(pt))
            if k > 0:
                out.append((pt, k))
        return Divisor.make(out)

    def maximal_subdivisors(self) -> Iterator["Divisor"]:
        """All subdivisors of degree deg - 1 (one multiplicity decremented).

        Spans are monotone in the divisor, so checking these suffices for any
        "not in the span of a proper subscheme" test.
        """
        for i, (pt, m) in enumerate(self.pairs):
            rest = self.pairs[:i] + self.pairs[i + 1:]
            if m > 1:
                yield Divisor(tuple(sorted(rest + ((pt, m - 1),),
                                           key=lambda kv: point_sort_key(kv[0]))))
            else:
                yield Divisor(rest)

    def __repr__(self):
        return f"Divisor({format_divisor_raw(self)})"


def divisor_lattice(A: Divisor, B: Divisor) -> Tuple[Divisor, Divisor, Divisor]:
    """(union, intersection, sum): pointwise max, min and sum of multiplicities."""
    return A.union(B), A.intersection(B), A.add(B)


def format_divisor_raw(D: Divisor) -> str:
    if D.is_empty:
        return "0"
    terms = []
    for pt, m in D.pairs:
        body = "O" if pt.is_origin else f"({pt.x},{pt.y})"
        terms.append(f"{m}*{body}")
    return "+".join(terms)


def format_divisor(D: Divisor, curve: Curve) -> str:
    """Canonical printing: sorted support, explicit multiplicities."""
    if D.is_empty:
        return "0"
    fmt = curve.field.format
    terms = []
    for pt, m in D.pairs:
        body = "O" if pt.is_origin else f"({fmt(pt.x)},{fmt(pt.y)})"
        terms.append(f"{m}*{body}")
    return "+".join(terms)


_NUM = re.compile(r"-?\d+(/\d+)?")


def parse_divisor(curve: Curve, text: str) -> Divisor:
    """Parse the divisor grammar; raises DivisorSyntaxError with a position."""
    s = text
    n = len(s)
    i = 0
    pairs = []

    def skip_ws(j):
        while j < n and s[j].isspace():
            j += 1
        return j

    def parse_number(j):
        m = _NUM.match(s, j)
        if not m:
            raise DivisorSyntaxError("expected a number", j)
        return m.group(0), m.end()

    i = skip_ws(i)
    if i == n:
        raise DivisorSyntaxError("empty divisor", i)
    if s[i:].strip() == "0":
        return Divisor.empty()
    while True:
        i = skip_ws(i)
        mult = 1
        # optional "k*" prefix
        m = re.match(r"\d+", s[i:])
        if m:
            j = skip_ws(i + m.end())
            if j < n and s[j] == "*":
                mult = int(m.group(0))
                if mult < 1:
                    raise DivisorSyntaxError("multiplicity must be >= 1", i)
                i = skip_ws(j + 1)
        if i < n and s[i] == "O":
            pt = ORIGIN
            i += 1
        elif i < n and s[i] == "(":
            i = skip_ws(i + 1)
            xs, i = parse_number(i)
            i = skip_ws(i)
            if i >= n or s[i] != ",":
                raise DivisorSyntaxError("expected ','", i)
            i = skip_ws(i + 1)
            ys, i = parse_number(i)
            i = skip_ws(i)
            if i >= n or s[i] != ")":
                raise DivisorSyntaxError("expected ')'", i)
            i += 1
            try:
                x = curve.field.parse(xs)
                y = curve.field.parse(ys)
            except (ValueError, ZeroDivisionError):
                raise DivisorSyntaxError("bad coordinate", i) from None
            pt = CurvePoint(x, y)
            if not curve.contains(pt):
                raise DivisorError(f"point ({xs},{ys}) is not on the curve")
        else:
            raise DivisorSyntaxError("expected '(x,y)' or 'O'", i)
        pairs.append((pt, mult))
        i = skip_ws(i)
        if i == n:
            break
        if s[i] != "+":
            raise DivisorSyntaxError("expected '+'", i)
        i += 1
    return Divisor.make(pairs, curve)
