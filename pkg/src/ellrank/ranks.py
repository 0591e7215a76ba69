"""Rank machinery: border-rank certificates, evincing-scheme enumeration,
exhaustive and randomized rank searches, super-rank point construction,
secant-dimension probes and open-rank verification.

Every positive claim is certified by exact linear algebra. Negative claims
("no set of size s spans P") are always scoped to the rational points of the
chosen finite field; callers surface that caveat in reports.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import comb
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import fastsearch
from .curve import CurvePoint
from .divisor import Divisor
from .embedding import NormalEmbedding, ProjPoint
from .fields import PrimeField
from .linalg import rank_profile
from .spans import point_in_span, span_intersection, strictly_spanned_by


class RankLabError(ValueError):
    pass


class PreconditionError(RankLabError):
    pass


class BudgetExceededError(RankLabError):
    pass


class SearchExhaustedError(RankLabError):
    pass


class TheoryViolationError(RankLabError):
    """An exact check contradicted a statement that should hold over any field.

    Raised instead of silently continuing; drivers catch it and record the
    candidate counterexample.
    """


def _require_prime(X: NormalEmbedding, what: str):
    if not isinstance(X.field, PrimeField):
        raise PreconditionError(f"{what} requires a prime field")


def _scaled(Z: Divisor, k: int) -> Divisor:
    return Divisor.make([(pt, m * k) for pt, m in Z.pairs])


# ---------------------------------------------------------------------------
# sampling and certificates


def generic_point_in_span(X: NormalEmbedding, W: Divisor, rng: random.Random,
                          max_tries: int = 64) -> ProjPoint:
    """Random point of <W> not in the span of any proper subscheme.

    Rejection-samples random combinations of the jet rows of W until the
    strictness certificate holds.
    """
    if W.degree < 1:
        raise PreconditionError("W must have degree >= 1")
    K = X.field
    rows = X.jet_matrix(W).rows
    for _ in range(max_tries):
        cs = [K.random(rng) for _ in rows]
        if all(K.is_zero(c) for c in cs):
            continue
        coords = [K.zero] * X.dim_sections
        for c, row in zip(cs, rows):
            if K.is_zero(c):
                continue
            coords = [K.add(x, K.mul(c, y)) for x, y in zip(coords, row)]
        if all(K.is_zero(x) for x in coords):
            continue
        P = ProjPoint.of(K, coords)
        if strictly_spanned_by(X, P, W):
            return P
    raise SearchExhaustedError(
        f"no strictly spanned point found in {max_tries} tries (field too small for deg {W.degree}?)")


@dataclass(frozen=True)
class BorderRankCert:
    """Certificate that the border rank of P is exactly deg(W).

    Valid iff 2*deg(W) <= n+1 and P is strictly spanned by W; the proof is
    pure linear algebra, so a valid certificate holds over any field.
    """

    point: ProjPoint
    scheme: Divisor
    w: int
    degree_bound_ok: bool
    membership_ok: bool
    strictness_ok: bool

    @property
    def valid(self) -> bool:
        return self.degree_bound_ok and self.membership_ok and self.strictness_ok

    @property
    def failing_check(self) -> Optional[str]:
        if not self.degree_bound_ok:
            return "degree bound 2w <= n+1 violated"
        if not self.membership_ok:
            return "membership failed"
        if not self.strictness_ok:
            return "strictness failed"
        return None


def border_rank_cert(X: NormalEmbedding, P: ProjPoint, W: Divisor) -> BorderRankCert:
    w = W.degree
    degree_ok = 2 * w <= X.n + 1
    member = point_in_span(X, P, W)
    strict = member and not any(point_in_span(X, P, Wp) for Wp in W.maximal_subdivisors())
    return BorderRankCert(P, W, w, degree_ok, member, strict)


# ---------------------------------------------------------------------------
# evincing schemes


@dataclass(frozen=True)
class PairData:
    i: int
    j: int
    disjoint: bool
    class_sum_is_origin: bool


@dataclass(frozen=True)
class EvincingFamilyReport:
    point: ProjPoint
    degree: int
    schemes: Tuple[Divisor, ...]
    enumerated: int
    pairwise: Tuple[PairData, ...]
    double_in_O1: Tuple[bool, ...]  # per scheme: 2Z a hyperplane-section class


def evincing_schemes(X: NormalEmbedding, P: ProjPoint, t: int,
                     budget: int = 2_000_000) -> EvincingFamilyReport:
    """All degree-t schemes supported on rational points that strictly span P.

    Exhaustive over multisets of rational points (so non-reduced schemes are
    included). For t <= floor(n/2) at most one scheme can exist; a second one
    raises TheoryViolationError.
    """
    _require_prime(X, "evincing-scheme enumeration")
    if t < 1:
        raise PreconditionError("degree t must be >= 1")
    pts = X.curve.enumerate_points()
    n_multisets = comb(len(pts) + t - 1, t)
    if n_multisets > budget:
        raise BudgetExceededError(
            f"enumeration needs {n_multisets} candidates, budget is {budget}")
    K = X.field
    found: List[Divisor] = []
    for combo in combinations_with_replacement(pts, t):
        pairs = []
        run = None
        m = 0
        for q in combo:
            if q == run:
                m += 1
            else:
                if run is not None:
                    pairs.append((run, m))
                run, m = q, 1
        pairs.append((run, m))
        Z = Divisor(tuple(pairs))  # combo is canonically ordered already
        # cheap membership first: jet rank is deg Z for deg <= n, so P in <Z>
        # iff stacking P keeps rank t
        M = X.jet_matrix(Z).with_row(P.coords)
        if rank_profile(M).rank != t:
            continue
        if strictly_spanned_by(X, P, Z):
            found.append(Z)
    if t <= X.n // 2 and len(found) > 1:
        raise TheoryViolationError(
            f"uniqueness violated: {len(found)} schemes of degree {t} <= n/2 strictly span {P}")
    pairwise = []
    for i in range(len(found)):
        for j in range(i + 1, len(found)):
            inter = found[i].intersection(found[j])
            sigma = X.curve.divisor_class_sum(found[i].add(found[j]).pairs)
            pairwise.append(PairData(i, j, inter.is_empty, sigma.is_origin))
    doubles = tuple(X.in_O1(_scaled(Z, 2)) for Z in found)
    return EvincingFamilyReport(P, t, tuple(found), n_multisets, tuple(pairwise), doubles)


# ---------------------------------------------------------------------------
# rank searches


def rank_upper_search(X: NormalEmbedding, P: ProjPoint, W: Divisor, r: int,
                      avoid: Iterable[CurvePoint], trials: int,
                      rng: random.Random) -> Optional[Divisor]:
    """Randomized search for a reduced S with |S| = r = n+1-w and P in <S>.

    Each trial draws r-1 distinct rational points outside avoid and supp(W),
    forces the last point by the class constraint S + W in |O(1)|, and accepts
    iff P lies in <S>. Returns the first accepted S (disjoint from avoid), or
    None when the trial budget is exhausted; a None is never a refutation.
    """
    _require_prime(X, "rank upper search")
    if r != X.n + 1 - W.degree:
        raise PreconditionError(f"r must equal n+1-deg(W) = {X.n + 1 - W.degree}")
    curve = X.curve
    forbidden = set(W.support()) | set(avoid)
    pool = [q for q in curve.enumerate_points() if q not in forbidden]
    if len(pool) < r:
        raise PreconditionError("too few rational points outside the avoid set")
    sigma_w = curve.divisor_class_sum(W.pairs)
    for _ in range(trials):
        chosen = rng.sample(pool, r - 1)
        s = sigma_w
        for q in chosen:
            s = curve.add(s, q)
        q_star = curve.negate(s)
        if q_star in forbidden or q_star in chosen:
            continue
        S = Divisor.of_points(chosen + [q_star])
        if point_in_span(X, P, S):
            return S
    return None


@dataclass(frozen=True)
class ExhaustiveReducedResult:
    min_size: Optional[int]
    witness: Optional[Divisor]
    sizes_exhausted: Tuple[int, ...]
    subsets_tested: int
    budget_exceeded: bool


def rank_exhaustive_reduced(X: NormalEmbedding, P: ProjPoint, r_max: int,
                            budget: int = 5_000_000,
                            engine: str = "auto") -> ExhaustiveReducedResult:
    """Exhaustive test of every reduced rational subset of size 1..r_max.

    Returns the smallest spanning size with a witness, or records the fully
    exhausted sizes (each one certifies "no rational reduced set of that size
    spans P"). A budget overrun stops the scan and is flagged, never silent.
    """
    _require_prime(X, "exhaustive rank search")
    if r_max < 1:
        raise PreconditionError("r_max must be >= 1")
    pts = X.curve.enumerate_points()
    vectors = [X.embed_point(q).coords for q in pts]
    if engine == "auto":
        engine = "batched" if r_max <= X.n else "reference"
    if engine == "batched":
        if r_max > X.n:
            raise PreconditionError("batched engine requires r_max <= n")
        out = fastsearch.min_spanning_subset(vectors, P.coords, X.field.p, r_max, budget)
    elif engine == "reference":
        out = fastsearch.min_spanning_subset_reference(vectors, P.coords, X.field.p,
                                                       r_max, budget)
    else:
        raise PreconditionError(f"unknown engine {engine!r}")
    witness = None
    if out.witness is not None:
        witness = Divisor.of_points([pts[i] for i in out.witness])
    return ExhaustiveReducedResult(out.min_size, witness, out.sizes_exhausted,
                                   out.subsets_tested, out.budget_exceeded)


# ---------------------------------------------------------------------------
# super-rank points


@dataclass(frozen=True)
class SuperRankPoint:
    """A point whose border rank k+1 is evinced only by non-reduced schemes,
    so its rank among reduced sets exceeds k+1. All predicates are
    machine-checked and recorded."""

    point: ProjPoint
    z1: Divisor
    z2: Divisor
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def all_checks_pass(self) -> bool:
        return all(self.checks.values())


def construct_superrank_point(X: NormalEmbedding, k: int, rng: random.Random,
                              max_tries: int = 400) -> SuperRankPoint:
    """Build Q in P^(2k+1) with border rank k+1 but reduced rank > k+1.

    Z1 = 2A + (k-1 general points) with 2*Z1 not a hyperplane-section class;
    Z2 = 2C + (k-1 general points), disjoint from Z1, with the class of
    Z1 + Z2 trivial (C solved by exhaustive [2]-division). Q is the unique
    point of <Z1> /\\ <Z2>.
    """
    if k < 1:
        raise PreconditionError("k must be >= 1")
    if X.n != 2 * k + 1:
        raise PreconditionError(f"need n = 2k+1 = {2 * k + 1}, got n = {X.n}")
    _require_prime(X, "super-rank construction")
    curve = X.curve
    pts = curve.enumerate_points()
    if len(pts) < 2 * k + 3:
        raise PreconditionError("too few rational points")
    halves: Dict[CurvePoint, List[CurvePoint]] = {}
    for c in pts:
        halves.setdefault(curve.scalar_mult(2, c), []).append(c)
    for _ in range(max_tries):
        support1 = rng.sample(pts, k)
        a_pt, extras1 = support1[0], support1[1:]
        z1 = Divisor.make([(a_pt, 2)] + [(q, 1) for q in extras1])
        if curve.divisor_class_sum(_scaled(z1, 2).pairs).is_origin:
            continue  # need 2*Z1 outside |O(1)|
        used = set(z1.support())
        pool2 = [q for q in pts if q not in used]
        if len(pool2) < k:
            continue
        extras2 = rng.sample(pool2, k - 1) if k > 1 else []
        s = curve.divisor_class_sum(z1.pairs)
        for q in extras2:
            s = curve.add(s, q)
        target = curve.negate(s)  # need [2]C = target
        cands = [c for c in halves.get(target, ())
                 if c not in used and c not in extras2]
        if not cands:
            continue
        c_pt = cands[rng.randrange(len(cands))]
        z2 = Divisor.make([(c_pt, 2)] + [(q, 1) for q in extras2])
        inter = span_intersection(X, z1, z2)
        if inter.dim != 0:
            continue
        Q = inter.witness
        checks = {
            "disjoint": z1.intersection(z2).is_empty,
            "z1_nonreduced": not z1.is_reduced,
            "z2_nonreduced": not z2.is_reduced,
            "sum_in_O1": X.in_O1(z1.add(z2)),
            "double_z1_not_in_O1": not X.in_O1(_scaled(z1, 2)),
            "intersection_is_single_point": inter.dim == 0,
            "strictly_spanned_by_z1": strictly_spanned_by(X, Q, z1),
            "strictly_spanned_by_z2": strictly_spanned_by(X, Q, z2),
        }
        if all(checks.values()):
            return SuperRankPoint(Q, z1, z2, checks)
    raise SearchExhaustedError(
        f"no super-rank configuration found in {max_tries} tries; resample the curve or p")


@dataclass(frozen=True)
class TwoWitnessPoint:
    """A point built as the unique span-intersection of two disjoint reduced
    rational schemes with complementary classes; both schemes strictly span it."""

    point: ProjPoint
    z1: Divisor
    z2: Divisor


def construct_two_witness_point(X: NormalEmbedding, t: int, rng: random.Random,
                                max_tries: int = 400) -> TwoWitnessPoint:
    """Sample P off the tangent surface with two known reduced rational
    degree-t schemes strictly spanning it (2t = n+1).

    Configurations whose class is 2-torsion are rejected: there the whole
    pencil of degree-t divisors in that class spans a common point (a cone
    vertex, which lies on the tangent surface and has infinitely many
    spanning schemes).
    """
    if 2 * t != X.n + 1:
        raise PreconditionError("need 2t = n+1")
    _require_prime(X, "two-witness construction")
    curve = X.curve
    pts = curve.enumerate_points()
    if len(pts) < 2 * t + 1:
        raise PreconditionError("too few rational points")
    for _ in range(max_tries):
        sup1 = rng.sample(pts, t)
        z1 = Divisor.of_points(sup1)
        if curve.divisor_class_sum(_scaled(z1, 2).pairs).is_origin:
            continue  # 2-torsion class: cone vertex ahead
        pool = [q for q in pts if q not in sup1]
        sup2 = rng.sample(pool, t - 1)
        s = curve.divisor_class_sum(z1.pairs)
        for q in sup2:
            s = curve.add(s, q)
        q_star = curve.negate(s)
        if q_star in sup1 or q_star in sup2:
            continue
        z2 = Divisor.of_points(sup2 + [q_star])
        inter = span_intersection(X, z1, z2)
        if inter.dim != 0:
            continue
        P = inter.witness
        if strictly_spanned_by(X, P, z1) and strictly_spanned_by(X, P, z2):
            return TwoWitnessPoint(P, z1, z2)
    raise SearchExhaustedError(
        f"no two-witness configuration found in {max_tries} tries")


# ---------------------------------------------------------------------------
# secant dimension probe


def terracini_dim(X: NormalEmbedding, t: int, rng: random.Random,
                  trials: int = 100) -> int:
    """Dimension of the t-th secant variety, probed at random double points.

    Returns max over trials of rank(jet(2Q_1 + ... + 2Q_t)) - 1; the expected
    value is min(n, 2t-1).
    """
    if t < 1:
        raise PreconditionError("t must be >= 1")
    _require_prime(X, "secant-dimension probe")
    pts = X.curve.enumerate_points()
    if len(pts) < t:
        raise PreconditionError("too few rational points")
    best = -1
    for _ in range(trials):
        qs = rng.sample(pts, t)
        Z = Divisor.make([(q, 2) for q in qs])
        best = max(best, rank_profile(X.jet_matrix(Z)).rank - 1)
    return best


# ---------------------------------------------------------------------------
# exclusion and open rank


@dataclass(frozen=True)
class ExclusionProof:
    """Evidence that P cannot lie in the span of F (F disjoint from W).

    independence of W + F forces <W> /\\ <F> to be empty, so P (strictly
    spanned by W) is not in <F>; the direct membership test must agree.
    """

    w_scheme: Divisor
    f_set: Divisor
    independent_rank_ok: bool
    direct_nonmembership_ok: bool

    @property
    def agree(self) -> bool:
        # full rank implies exclusion; a disagreement is a theory violation
        return (not self.independent_rank_ok) or self.direct_nonmembership_ok

    @property
    def excluded(self) -> bool:
        return self.independent_rank_ok and self.direct_nonmembership_ok


def disjoint_exclusion_check(X: NormalEmbedding, P: ProjPoint, W: Divisor,
                             F: Divisor) -> ExclusionProof:
    if not F.is_reduced:
        raise PreconditionError("F must be a reduced divisor")
    if not F.intersection(W).is_empty:
        raise PreconditionError("F must be disjoint from the support of W")
    if W.degree + F.degree > X.n:
        raise PreconditionError("need deg(W) + deg(F) <= n")
    if not strictly_spanned_by(X, P, W):
        raise PreconditionError("P is not strictly spanned by W")
    rank_ok = rank_profile(X.jet_matrix(W.add(F))).rank == W.degree + F.degree
    direct_ok = not point_in_span(X, P, F)
    return ExclusionProof(W, F, rank_ok, direct_ok)


@dataclass(frozen=True)
class AvoidSearchRun:
    avoid: Tuple[CurvePoint, ...]
    witness: Optional[Divisor]


@dataclass(frozen=True)
class OpenRankReport:
    point: ProjPoint
    w_scheme: Divisor
    target_size: int
    avoid_runs: Tuple[AvoidSearchRun, ...]
    search_successes: int
    exclusion_trials: int
    exclusions_passed: int
    disagreements: int

    @property
    def all_searches_succeeded(self) -> bool:
        return self.search_successes == len(self.avoid_runs)

    @property
    def all_excluded(self) -> bool:
        return self.exclusions_passed == self.exclusion_trials and self.disagreements == 0


def open_rank_verify(X: NormalEmbedding, P: ProjPoint, W: Divisor,
                     avoid_sets: Sequence[Sequence[CurvePoint]], trials: int,
                     rng: random.Random,
                     exclusion_samples: int = 200) -> OpenRankReport:
    """Evidence for the open rank n+1-w: witness sets avoiding each given set,
    plus exclusion proofs for sampled disjoint sets of size <= n-w."""
    w = W.degree
    if X.n < 2 * w + 2:
        raise PreconditionError(f"need n >= 2w+2 = {2 * w + 2}")
    if not strictly_spanned_by(X, P, W):
        raise PreconditionError("P is not strictly spanned by W")
    _require_prime(X, "open-rank verification")
    r = X.n + 1 - w
    runs = []
    successes = 0
    for U in avoid_sets:
        S = rank_upper_search(X, P, W, r, U, trials, rng)
        if S is not None:
            successes += 1
        runs.append(AvoidSearchRun(tuple(U), S))
    pool = [q for q in X.curve.enumerate_points() if q not in set(W.support())]
    passed = 0
    disagreements = 0
    for _ in range(exclusion_samples):
        size = rng.randrange(1, X.n - w + 1)
        F = Divisor.of_points(rng.sample(pool, size))
        proof = disjoint_exclusion_check(X, P, W, F)
        if proof.excluded:
            passed += 1
        if not proof.agree:
            disagreements += 1
    return OpenRankReport(P, W, r, tuple(runs), successes,
                          exclusion_samples, passed, disagreements)
