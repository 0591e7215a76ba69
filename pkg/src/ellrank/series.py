"""Truncated power series over an exact field.

A series is a plain tuple of n coefficients (t^0 .. t^(n-1)); all operations
truncate to the length of their inputs. Used for local charts and jets, where
orders never exceed the curve degree plus a couple of guard terms.
"""

from __future__ import annotations

from .fields import Field


def constant(field: Field, value, n: int):
    return (value,) + (field.zero,) * (n - 1)


def add(field: Field, a, b):
    return tuple(field.add(x, y) for x, y in zip(a, b))


def sub(field: Field, a, b):
    return tuple(field.sub(x, y) for x, y in zip(a, b))


def scale(field: Field, c, a):
    return tuple(field.mul(c, x) for x in a)


def mul(field: Field, a, b):
    n = min(len(a), len(b))
    out = [field.zero] * n
    for i, x in enumerate(a[:n]):
        if field.is_zero(x):
            continue
        for j, y in enumerate(b[: n - i]):
            if not field.is_zero(y):
                out[i + j] = field.add(out[i + j], field.mul(x, y))
    return tuple(out)


def power(field: Field, a, e: int):
    out = constant(field, field.one, len(a))
    for _ in range(e):
        out = mul(field, out, a)
    return out


def inverse(field: Field, a):
    """Multiplicative inverse of a unit series (a[0] != 0)."""
    n = len(a)
    inv0 = field.inv(a[0])
    out = [inv0] + [field.zero] * (n - 1)
    for k in range(1, n):
        s = field.zero
        for i in range(1, k + 1):
            if i < n:
                s = field.add(s, field.mul(a[i], out[k - i]))
        out[k] = field.neg(field.mul(inv0, s))
    return tuple(out)


def shift(field: Field, a, k: int):
    """Coefficients of t^k * a(t), truncated to the original length."""
    if k == 0:
        return tuple(a)
    return (field.zero,) * k + tuple(a[: len(a) - k])


def order(field: Field, a):
    """Index of the first nonzero coefficient, or None for the zero series."""
    for i, x in enumerate(a):
        if not field.is_zero(x):
            return i
    return None
