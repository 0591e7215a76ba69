"""Exact coefficient fields.

Two kinds are supported: prime fields F_p with 5 <= p < 2**31 (elements are
canonical int residues in [0, p)) and the rationals (elements are
``fractions.Fraction``, which stay in lowest terms automatically). Every
operation is exact; there is no floating point anywhere in the package.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Union

Scalar = Union[int, Fraction]


class FieldError(ValueError):
    pass


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n < 3.3e24 (covers 2**31)."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """F_p for an odd prime p >= 5 (characteristics 2 and 3 are excluded)."""

    kind = "prime"

    def __init__(self, p: int):
        if not isinstance(p, int) or not is_prime(p):
            raise FieldError(f"p = {p!r} is not prime")
        if p < 5:
            raise FieldError(f"p = {p} not allowed; need p >= 5")
        if p >= 2**31:
            raise FieldError(f"p = {p} too large; need p < 2**31")
        self.p = p

    # elements are ints in [0, p)

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def from_int(self, n: int) -> int:
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise FieldError("division by zero")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def random(self, rng: random.Random) -> int:
        return rng.randrange(self.p)

    def parse(self, text: str) -> int:
        """Accept integer literals and 'a/b' (interpreted as a * b**-1)."""
        text = text.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            return self.div(int(num) % self.p, int(den) % self.p)
        return int(text) % self.p

    def format(self, a) -> str:
        return str(a % self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("prime", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


class RationalField:
    """Arbitrary-precision rationals; elements are Fraction (always reduced)."""

    kind = "rationals"

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise FieldError("division by zero")
        return 1 / Fraction(a)

    def div(self, a, b):
        if b == 0:
            raise FieldError("division by zero")
        return Fraction(a) / b

    def is_zero(self, a) -> bool:
        return a == 0

    def random(self, rng: random.Random) -> Fraction:
        # bounded numerators/denominators keep property tests fast and exact
        return Fraction(rng.randrange(-20, 21), rng.randrange(1, 13))

    def parse(self, text: str) -> Fraction:
        return Fraction(text.strip())

    def format(self, a) -> str:
        f = Fraction(a)
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("rationals")

    def __repr__(self):
        return "RationalField()"


Field = Union[PrimeField, RationalField]

QQ = RationalField()
