"""Domain types and utility/welfare arithmetic for linear social choice.

Candidates and voters are nonnegative vectors on the unit simplex of R^d
(rows sum to 1); a voter's utility for a candidate is the inner product of
their vectors. Preference profiles hold per-voter total orders or pairwise
comparison lists over candidate indices.

All types are immutable after construction (arrays are set read-only), so
they can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

NORMALIZATION_TOL = 1e-6
UTILITY_CONSISTENCY_TOL = 1e-9
LOTTERY_TOL = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=np.float64)
    out.flags.writeable = False
    return out


def _check_matrix(vectors: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(vectors, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValidationError(f"{what} must be a nonempty 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} contains non-finite entries")
    return arr


def _renormalize_rows(arr: np.ndarray, what: str) -> np.ndarray:
    sums = arr.sum(axis=1)
    if np.any(sums <= 0):
        bad = int(np.argmax(sums <= 0))
        raise ValidationError(f"cannot renormalize {what}: row {bad} has nonpositive sum {sums[bad]:.6g}")
    return arr / sums[:, None]


def _simplex_violations(arr: np.ndarray, tol: float) -> list[str]:
    """Report entries and row sums that break simplex membership."""
    violations = []
    neg = np.argwhere(arr < 0)
    for i, j in neg:
        violations.append(f"negative entry {arr[i, j]:.6g} at ({i}, {j})")
    sums = arr.sum(axis=1)
    for i in np.flatnonzero(np.abs(sums - 1.0) > tol):
        violations.append(f"row {i} sums to {sums[i]:.6g}")
    return violations


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...] = ()

    def raise_if_invalid(self, what: str = "input") -> None:
        if not self.ok:
            raise ValidationError(f"invalid {what}: " + "; ".join(self.violations))


@dataclass(frozen=True)
class CandidateSet:
    """m candidate vectors on the simplex of R^d, as rows of an m x d matrix."""

    vectors: np.ndarray
    labels: tuple[str, ...] | None = None

    def __init__(self, vectors, labels: Sequence[str] | None = None, renormalize: bool = False):
        arr = _check_matrix(vectors, "candidate matrix")
        if renormalize:
            arr = _renormalize_rows(np.clip(arr, 0.0, None), "candidates")
        object.__setattr__(self, "vectors", _freeze(arr))
        if labels is not None:
            if len(labels) != arr.shape[0]:
                raise ValidationError(f"{len(labels)} labels for {arr.shape[0]} candidates")
            labels = tuple(str(s) for s in labels)
        object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    def label(self, c: int) -> str:
        return self.labels[c] if self.labels is not None else f"c{c}"


@dataclass(frozen=True)
class VoterSet:
    """n voter vectors on the simplex, with optional convex-combination witnesses.

    When ``weights`` is present, row v witnesses voter v as the combination
    ``weights[v] @ candidates.vectors``, certifying expressiveness.
    """

    vectors: np.ndarray
    weights: np.ndarray | None = None

    def __init__(self, vectors, weights=None, renormalize: bool = False):
        arr = _check_matrix(vectors, "voter matrix")
        if renormalize:
            arr = _renormalize_rows(np.clip(arr, 0.0, None), "voters")
        object.__setattr__(self, "vectors", _freeze(arr))
        if weights is not None:
            w = _check_matrix(weights, "combination weights")
            if w.shape[0] != arr.shape[0]:
                raise ValidationError("combination weights row count differs from voter count")
            weights = _freeze(w)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class Ranking:
    """A total order over candidate indices, most-preferred first."""

    order: tuple[int, ...]

    def __init__(self, order: Iterable[int]):
        order = tuple(int(c) for c in order)
        if sorted(order) != list(range(len(order))):
            raise ValidationError(f"ranking {order} is not a permutation of 0..{len(order) - 1}")
        object.__setattr__(self, "order", order)

    @cached_property
    def position(self) -> dict[int, int]:
        return {c: i for i, c in enumerate(self.order)}

    def top(self) -> int:
        return self.order[0]

    def prefers(self, a: int, b: int) -> bool:
        """Strict preference of a over b."""
        return self.position[a] < self.position[b]

    def preference_pairs(self) -> list[tuple[int, int]]:
        """Adjacent pairs; by transitivity they imply the full order."""
        return list(zip(self.order, self.order[1:]))

    def restricted_to(self, subset: Sequence[int]) -> "Ranking":
        """Induced sub-ranking, re-indexed by position in ``subset``."""
        index_of = {c: i for i, c in enumerate(subset)}
        return Ranking([index_of[c] for c in self.order if c in index_of])


@dataclass(frozen=True)
class PairwisePrefs:
    """A list of ordered comparisons (a, b) meaning a is strictly preferred to b."""

    pairs: tuple[tuple[int, int], ...]

    def __init__(self, pairs: Iterable[tuple[int, int]]):
        pairs = tuple((int(a), int(b)) for a, b in pairs)
        for a, b in pairs:
            if a == b:
                raise ValidationError(f"self-comparison pair ({a}, {a})")
        object.__setattr__(self, "pairs", pairs)
        if self._find_cycle():
            raise ValidationError("pairwise comparisons contain a directed cycle")

    def _find_cycle(self) -> bool:
        succ: dict[int, list[int]] = {}
        for a, b in self.pairs:
            succ.setdefault(a, []).append(b)
        WHITE, GRAY, BLACK = 0, 1, 2
        color: dict[int, int] = {}
        for start in succ:
            if color.get(start, WHITE) != WHITE:
                continue
            stack = [(start, iter(succ.get(start, ())))]
            color[start] = GRAY
            while stack:
                node, it = stack[-1]
                advanced = False
                for nxt in it:
                    state = color.get(nxt, WHITE)
                    if state == GRAY:
                        return True
                    if state == WHITE:
                        color[nxt] = GRAY
                        stack.append((nxt, iter(succ.get(nxt, ()))))
                        advanced = True
                        break
                if not advanced:
                    color[node] = BLACK
                    stack.pop()
        return False

    @cached_property
    def closure(self) -> set[tuple[int, int]]:
        """Transitive closure of the listed comparisons."""
        succ: dict[int, set[int]] = {}
        for a, b in self.pairs:
            succ.setdefault(a, set()).add(b)
        reach: dict[int, set[int]] = {}

        def dfs(node: int) -> set[int]:
            if node in reach:
                return reach[node]
            reach[node] = set()  # cycle-free by construction, placeholder for reentry
            acc: set[int] = set()
            for nxt in succ.get(node, ()):
                acc.add(nxt)
                acc |= dfs(nxt)
            reach[node] = acc
            return acc

        return {(a, b) for a in succ for b in dfs(a)}

    def prefers(self, a: int, b: int) -> bool:
        return (a, b) in self.closure

    def top(self, m: int) -> int:
        """The unique undominated candidate among 0..m-1, if one exists."""
        dominated = {b for _, b in self.closure}
        tops = [c for c in range(m) if c not in dominated]
        if len(tops) != 1:
            raise ValidationError(f"no unique top choice: maximal candidates {tops}")
        return tops[0]

    def preference_pairs(self) -> list[tuple[int, int]]:
        return list(self.pairs)


PreferenceRecord = Ranking | PairwisePrefs


@dataclass(frozen=True)
class Profile:
    """Ordinal preferences of n voters over m candidates."""

    records: tuple[PreferenceRecord, ...]
    m: int

    def __init__(self, records: Iterable[PreferenceRecord | Sequence[int]], m: int | None = None):
        coerced = []
        for rec in records:
            if isinstance(rec, (Ranking, PairwisePrefs)):
                coerced.append(rec)
            else:
                coerced.append(Ranking(rec))
        if not coerced:
            raise ValidationError("profile must contain at least one voter")
        inferred = 0
        for rec in coerced:
            if isinstance(rec, Ranking):
                inferred = max(inferred, len(rec.order))
            else:
                inferred = max(inferred, 1 + max((max(a, b) for a, b in rec.pairs), default=-1))
        m = inferred if m is None else int(m)
        if m < inferred:
            raise ValidationError(f"profile references candidate indices beyond m={m}")
        for rec in coerced:
            if isinstance(rec, Ranking) and len(rec.order) != m:
                raise ValidationError(f"ranking of length {len(rec.order)} in a profile over {m} candidates")
        object.__setattr__(self, "records", tuple(coerced))
        object.__setattr__(self, "m", m)

    @property
    def n(self) -> int:
        return len(self.records)

    def all_rankings(self) -> bool:
        return all(isinstance(r, Ranking) for r in self.records)

    def top_choices(self) -> list[int]:
        return [r.top() if isinstance(r, Ranking) else r.top(self.m) for r in self.records]

    def rank_matrix(self) -> np.ndarray:
        """n x m matrix of 0-based rank positions. Total orders only."""
        if not self.all_rankings():
            raise ValidationError("rank matrix requires total orders for every voter")
        ranks = np.empty((self.n, self.m), dtype=np.int64)
        for v, rec in enumerate(self.records):
            ranks[v, list(rec.order)] = np.arange(self.m)
        return ranks


@dataclass(frozen=True)
class UtilityProfile:
    """True voter-by-candidate utilities (n x m, nonnegative)."""

    utilities: np.ndarray

    def __init__(self, utilities):
        arr = _check_matrix(utilities, "utility matrix")
        if np.any(arr < 0):
            i, j = np.argwhere(arr < 0)[0]
            raise ValidationError(f"negative utility {arr[i, j]:.6g} at ({i}, {j})")
        object.__setattr__(self, "utilities", _freeze(arr))

    @property
    def n(self) -> int:
        return self.utilities.shape[0]

    @property
    def m(self) -> int:
        return self.utilities.shape[1]


@dataclass(frozen=True)
class Lottery:
    """A probability distribution over candidates."""

    probabilities: np.ndarray

    def __init__(self, probabilities):
        arr = np.asarray(probabilities, dtype=np.float64).ravel()
        if arr.size < 1 or not np.all(np.isfinite(arr)):
            raise ValidationError("lottery must be a nonempty finite vector")
        if np.any(arr < -LOTTERY_TOL):
            raise ValidationError(f"negative probability {arr.min():.6g}")
        total = arr.sum()
        if abs(total - 1.0) > LOTTERY_TOL:
            raise ValidationError(f"lottery sums to {total:.12g}, not 1")
        object.__setattr__(self, "probabilities", _freeze(np.clip(arr, 0.0, None)))

    @property
    def m(self) -> int:
        return self.probabilities.shape[0]

    @staticmethod
    def point_mass(c: int, m: int) -> "Lottery":
        p = np.zeros(m)
        p[c] = 1.0
        return Lottery(p)

    @staticmethod
    def uniform(m: int) -> "Lottery":
        return Lottery(np.full(m, 1.0 / m))

    def mean_vector(self, candidates: CandidateSet) -> np.ndarray:
        """The probability-weighted average candidate vector."""
        return self.probabilities @ candidates.vectors


@dataclass(frozen=True)
class Instance:
    """One experimental unit: candidates, optional voters/utilities, and a profile."""

    candidates: CandidateSet
    profile: Profile
    voters: VoterSet | None = None
    utilities: UtilityProfile | None = None
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.profile.m != self.candidates.m:
            raise ValidationError(
                f"profile over {self.profile.m} candidates, candidate set has {self.candidates.m}"
            )
        if self.utilities is not None and self.utilities.m != self.candidates.m:
            raise ValidationError("utility matrix width differs from candidate count")
        if self.voters is not None and self.utilities is not None:
            if self.utilities.n != self.voters.n:
                raise ValidationError("utility matrix height differs from voter count")
            implied = self.voters.vectors @ self.candidates.vectors.T
            gap = np.abs(implied - self.utilities.utilities).max()
            if gap > UTILITY_CONSISTENCY_TOL:
                raise ValidationError(f"utilities deviate from embedding inner products by {gap:.3g}")
        if self.utilities is not None:
            _check_profile_consistency(self.profile, self.utilities)

    @property
    def n(self) -> int:
        return self.profile.n

    @property
    def m(self) -> int:
        return self.candidates.m

    @property
    def d(self) -> int:
        return self.candidates.d


def _check_profile_consistency(profile: Profile, utilities: UtilityProfile) -> None:
    """Every reported comparison must be weakly supported by the utilities.

    Weak consistency (never ranking a strictly worse candidate higher) is the
    right invariant here: several worst-case constructions resolve utility
    ties adversarially, so demanding the one fixed tie-break would reject
    legitimately generated instances.
    """
    u = utilities.utilities
    if utilities.n != profile.n:
        raise ValidationError("utility matrix height differs from profile voter count")
    for v, rec in enumerate(profile.records):
        for a, b in rec.preference_pairs():
            if u[v, a] < u[v, b] - UTILITY_CONSISTENCY_TOL:
                raise ValidationError(
                    f"voter {v} ranks {a} above {b} but has utilities "
                    f"{u[v, a]:.6g} < {u[v, b]:.6g}"
                )


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def validate_candidates(candidates: CandidateSet, tol: float = NORMALIZATION_TOL) -> ValidationReport:
    """Report-style check of nonnegativity and row normalization."""
    violations = _simplex_violations(candidates.vectors, tol)
    return ValidationReport(ok=not violations, violations=tuple(violations))


def validate_voters(
    voters: VoterSet,
    candidates: CandidateSet | None = None,
    tol: float = NORMALIZATION_TOL,
) -> ValidationReport:
    """Like validate_candidates, plus the combination-witness check when present."""
    violations = _simplex_violations(voters.vectors, tol)
    if voters.weights is not None:
        violations += [f"weights: {v}" for v in _simplex_violations(voters.weights, tol)]
        if candidates is not None:
            if voters.weights.shape[1] != candidates.m:
                violations.append("weights width differs from candidate count")
            else:
                recon = voters.weights @ candidates.vectors
                gap = np.abs(recon - voters.vectors).max()
                if gap > tol:
                    violations.append(f"witness reconstruction off by {gap:.3g}")
    return ValidationReport(ok=not violations, violations=tuple(violations))


def utility(voter_vector: np.ndarray, candidate_vector: np.ndarray) -> float:
    """Inner-product utility of one voter for one candidate."""
    v = np.asarray(voter_vector, dtype=np.float64).ravel()
    c = np.asarray(candidate_vector, dtype=np.float64).ravel()
    if v.shape != c.shape:
        raise ValidationError(f"dimension mismatch: voter {v.shape} vs candidate {c.shape}")
    return float(v @ c)


def welfare(utilities: UtilityProfile, candidate: int) -> float:
    """Utilitarian welfare of a candidate: the column sum of utilities."""
    if not 0 <= candidate < utilities.m:
        raise IndexError(f"candidate index {candidate} out of range for m={utilities.m}")
    return float(utilities.utilities[:, candidate].sum())


def welfare_vector(utilities: UtilityProfile) -> np.ndarray:
    return utilities.utilities.sum(axis=0)


def expected_welfare(utilities: UtilityProfile, lottery: Lottery) -> float:
    """Probability-weighted welfare of a lottery."""
    if lottery.m != utilities.m:
        raise ValidationError(f"lottery length {lottery.m} differs from candidate count {utilities.m}")
    return float(lottery.probabilities @ welfare_vector(utilities))


def utilities_to_profile(utilities: UtilityProfile) -> Profile:
    """Rank candidates by utility, descending; ties broken by ascending index."""
    u = utilities.utilities
    orders = np.argsort(-u, axis=1, kind="stable")
    return Profile([Ranking(row) for row in orders], m=utilities.m)


def min_favorite_utility(
    voters: VoterSet,
    candidates: CandidateSet,
    check_expressiveness: bool = False,
) -> float:
    """min over voters of max over candidates of the inner-product utility.

    For voters in the candidate convex hull this is at least 1/d. The hull
    membership LP runs only on request: generators always carry witnesses,
    and ordinal-only workflows never need the check.
    """
    if voters.d != candidates.d:
        raise ValidationError("voter and candidate dimensions differ")
    if check_expressiveness and voters.weights is None:
        from .lp import in_convex_hull

        for i, v in enumerate(voters.vectors):
            if not in_convex_hull(v, candidates.vectors):
                raise ValidationError(f"voter {i} is outside the candidate convex hull")
    best = (voters.vectors @ candidates.vectors.T).max(axis=1)
    return float(best.min())
