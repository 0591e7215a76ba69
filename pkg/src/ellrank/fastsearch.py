"""Exhaustive minimum-spanning-subset search over a prime field.

Problem: given N vectors v_0..v_{N-1} in F_p^d and a target P, find the
smallest s <= r_max such that some s-subset has P in its linear span, and the
lexicographically first witness subset of that size.

Two engines with identical contracts:

* ``min_spanning_subset`` vectorizes the search with numpy. It works in the
  quotient space F_p^d / <P>: the target lies in span(S) iff the images of S
  become dependent there. Sizes are processed in increasing order, so when
  size s is reached every (s-1)-subset is known independent in the quotient,
  and an s-subset is dependent iff its largest element reduces to zero
  against the echelon basis of its prefix. That turns the whole level into
  batched eliminations over int64 arrays. Correctness of the quotient
  argument needs every r_max-subset of the input vectors to be linearly
  independent (true for embedded curve points whenever r_max <= n).

* ``min_spanning_subset_reference`` is the plain enumeration with a direct
  Gaussian span test per subset. No genericity assumption; used as the
  independent oracle in tests and as the fallback for r_max beyond the
  batched engine's precondition.

Both are deterministic pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import List, Optional, Sequence, Tuple

import numpy as np


class SearchPreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class ExhaustiveOutcome:
    min_size: Optional[int]
    witness: Optional[Tuple[int, ...]]
    sizes_exhausted: Tuple[int, ...]
    subsets_tested: int
    budget_exceeded: bool


_CHUNK = 1 << 18


def _mod_inv_array(a: np.ndarray, p: int) -> np.ndarray:
    """Batched a**(p-2) mod p by a binary ladder (int64, p < 2**31)."""
    e = p - 2
    result = np.ones_like(a)
    base = a % p
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def _quotient_images(vectors: np.ndarray, target: Sequence[int], p: int) -> np.ndarray:
    """Images of the vectors in F_p^d / <target>, as rows of length d-1."""
    t = np.asarray(target, dtype=np.int64) % p
    j = int(np.nonzero(t)[0][0])
    t = t * _mod_inv_array(t[j : j + 1], p) % p  # t[j] = 1
    u = (vectors - vectors[:, j : j + 1] * t[np.newaxis, :]) % p
    return np.delete(u, j, axis=1)


def min_spanning_subset(vectors: Sequence[Sequence[int]], target: Sequence[int],
                        p: int, r_max: int,
                        budget: Optional[int] = None) -> ExhaustiveOutcome:
    V = np.asarray(vectors, dtype=np.int64) % p
    N, d = V.shape
    if len(target) != d:
        raise SearchPreconditionError("target length mismatch")
    if r_max < 1:
        raise SearchPreconditionError("r_max must be >= 1")
    if r_max >= d:
        raise SearchPreconditionError(
            "batched engine needs r_max < dim (use the reference engine)")
    r_max = min(r_max, N)
    U = _quotient_images(V, target, p)
    dq = d - 1

    tested = 0
    exhausted: List[int] = []

    def out_of_budget(s):
        return budget is not None and tested + comb(N, s) > budget

    # size 1: a zero image means the vector is proportional to the target
    if out_of_budget(1):
        return ExhaustiveOutcome(None, None, (), tested, True)
    tested += N
    zero_rows = np.nonzero(~U.any(axis=1))[0]
    if zero_rows.size:
        return ExhaustiveOutcome(1, (int(zero_rows[0]),), (), tested, False)
    exhausted.append(1)

    # level state for subsets of the current size, in lexicographic order
    subsets = np.arange(N, dtype=np.int64)[:, np.newaxis]
    ech = U[:, np.newaxis, :].copy()
    pivcol = U.astype(bool).argmax(axis=1).astype(np.int64)[:, np.newaxis]
    pivinv = _mod_inv_array(U[np.arange(N), pivcol[:, 0]], p)[:, np.newaxis]

    for s in range(2, r_max + 1):
        if out_of_budget(s):
            return ExhaustiveOutcome(None, None, tuple(exhausted), tested, True)
        B = subsets.shape[0]
        last = subsets[:, -1]
        counts = (N - 1 - last).astype(np.int64)
        total = int(counts.sum())
        tested += total
        if total == 0:
            # no size-s subsets exist at all (tiny N); larger sizes are vacuous too
            exhausted.extend(range(s, r_max + 1))
            break
        parents_all = np.repeat(np.arange(B, dtype=np.int64), counts)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        cands_all = (np.arange(total, dtype=np.int64) - starts
                     + np.repeat(last + 1, counts))

        build = s < r_max
        if build:
            new_subsets = np.empty((total, s), dtype=np.int64)
            new_ech = np.empty((total, s, dq), dtype=np.int64)
            new_pivcol = np.empty((total, s), dtype=np.int64)
            new_pivinv = np.empty((total, s), dtype=np.int64)

        for lo in range(0, total, _CHUNK):
            hi = min(lo + _CHUNK, total)
            par = parents_all[lo:hi]
            cand = cands_all[lo:hi]
            R = U[cand].copy()
            rows = np.arange(hi - lo)
            for k in range(s - 1):
                coef = R[rows, pivcol[par, k]] * pivinv[par, k] % p
                R = (R - coef[:, np.newaxis] * ech[par, k, :]) % p
            dep = ~R.any(axis=1)
            if dep.any():
                i = int(dep.argmax())
                witness = tuple(int(x) for x in subsets[par[i]]) + (int(cand[i]),)
                return ExhaustiveOutcome(s, witness, tuple(exhausted), tested, False)
            if build:
                pc = R.astype(bool).argmax(axis=1)
                pv = R[rows, pc]
                new_subsets[lo:hi, :-1] = subsets[par]
                new_subsets[lo:hi, -1] = cand
                new_ech[lo:hi, :-1, :] = ech[par]
                new_ech[lo:hi, -1, :] = R
                new_pivcol[lo:hi, :-1] = pivcol[par]
                new_pivcol[lo:hi, -1] = pc
                new_pivinv[lo:hi, :-1] = pivinv[par]
                new_pivinv[lo:hi, -1] = _mod_inv_array(pv, p)
        exhausted.append(s)
        if build:
            subsets, ech, pivcol, pivinv = new_subsets, new_ech, new_pivcol, new_pivinv

    return ExhaustiveOutcome(None, None, tuple(exhausted), tested, False)


def _span_contains(rows: List[List[int]], target: Sequence[int], p: int) -> bool:
    """Direct span test by Gaussian elimination mod p (no assumptions)."""
    basis = []  # (pivot column, normalized row), rows reduced against earlier ones
    for row in rows:
        r = list(row)
        for c, br in basis:
            f = r[c]
            if f:
                r = [(x - f * y) % p for x, y in zip(r, br)]
        lead = next((j for j, x in enumerate(r) if x), None)
        if lead is not None:
            inv = pow(r[lead], -1, p)
            basis.append((lead, [x * inv % p for x in r]))
    res = list(target)
    for c, br in basis:
        f = res[c]
        if f:
            res = [(x - f * y) % p for x, y in zip(res, br)]
    return not any(res)


def min_spanning_subset_reference(vectors: Sequence[Sequence[int]], target: Sequence[int],
                                  p: int, r_max: int,
                                  budget: Optional[int] = None) -> ExhaustiveOutcome:
    N = len(vectors)
    rows = [[x % p for x in v] for v in vectors]
    tgt = [x % p for x in target]
    r_max = min(r_max, N)
    tested = 0
    exhausted: List[int] = []
    for s in range(1, r_max + 1):
        if budget is not None and tested + comb(N, s) > budget:
            return ExhaustiveOutcome(None, None, tuple(exhausted), tested, True)
        for idx in combinations(range(N), s):
            tested += 1
            if _span_contains([rows[i] for i in idx], tgt, p):
                return ExhaustiveOutcome(s, idx, tuple(exhausted), tested, False)
        exhausted.append(s)
    return ExhaustiveOutcome(None, None, tuple(exhausted), tested, False)
