"""Ordinal voting rules: plurality, max-coordinate plurality, and the
randomized scoring-rule family (random dictatorship, harmonic, uniform).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import CandidateSet, Lottery, PairwisePrefs, Profile, Ranking


@dataclass(frozen=True)
class ScoreVector:
    """A nonincreasing, nonnegative positional scoring vector.

    ``l1_norm`` may be supplied when a closed form is available (the harmonic
    constructor uses 2 * H_m exactly instead of re-summing the entries).
    """

    scores: np.ndarray
    l1_norm: float

    def __init__(self, scores, l1_norm: float | None = None):
        arr = np.asarray(scores, dtype=np.float64).ravel()
        if arr.size < 1:
            raise ValidationError("score vector must be nonempty")
        if np.any(arr < 0):
            raise ValidationError("scores must be nonnegative")
        if np.any(np.diff(arr) > 1e-12):
            raise ValidationError("scores must be nonincreasing")
        if not arr.any():
            raise ValidationError("score vector is identically zero")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "scores", arr)
        object.__setattr__(self, "l1_norm", float(arr.sum()) if l1_norm is None else float(l1_norm))

    @property
    def m(self) -> int:
        return self.scores.shape[0]

    @staticmethod
    def plurality(m: int) -> "ScoreVector":
        s = np.zeros(m)
        s[0] = 1.0
        return ScoreVector(s)

    @staticmethod
    def uniform(m: int) -> "ScoreVector":
        return ScoreVector(np.ones(m))

    @staticmethod
    def harmonic(m: int) -> "ScoreVector":
        """s_i = 1/i + H_m/m, whose entries sum to exactly 2 * H_m."""
        h_m = harmonic_number(m)
        i = np.arange(1, m + 1, dtype=np.float64)
        return ScoreVector(1.0 / i + h_m / m, l1_norm=2.0 * h_m)


def harmonic_number(m: int) -> float:
    return float(np.sum(1.0 / np.arange(1, m + 1)))


def plurality(profile: Profile) -> int:
    """Candidate with the most first-place votes; ties go to the lowest index."""
    counts = np.bincount(profile.top_choices(), minlength=profile.m)
    return int(np.argmax(counts))


def coordinate_maxima(candidates: CandidateSet) -> list[int]:
    """One candidate per coordinate, maximal in that coordinate (ties by index)."""
    picks = np.argmax(candidates.vectors, axis=0)
    return sorted(set(int(j) for j in picks))


def max_coordinate_plurality(profile: Profile, candidates: CandidateSet) -> int:
    """Plurality restricted to the per-coordinate-maximal candidates.

    Restriction preserves each voter's relative order over the surviving
    candidates.
    """
    if profile.m != candidates.m:
        raise ValidationError("profile and candidate set disagree on m")
    subset = coordinate_maxima(candidates)
    counts = np.zeros(len(subset), dtype=np.int64)
    member = {c: i for i, c in enumerate(subset)}
    for rec in profile.records:
        if isinstance(rec, Ranking):
            top = next(c for c in rec.order if c in member)
        else:
            top = _pairwise_top_within(rec, subset)
        counts[member[top]] += 1
    return subset[int(np.argmax(counts))]


def _pairwise_top_within(rec: PairwisePrefs, subset: list[int]) -> int:
    dominated = {b for a, b in rec.closure if a in subset and b in subset}
    tops = [c for c in subset if c not in dominated]
    if len(tops) != 1:
        raise ValidationError(f"no unique top choice within {subset}: maximal {tops}")
    return tops[0]


def rsr_lottery(profile: Profile, scores: ScoreVector) -> Lottery:
    """Randomized scoring rule: Pr[c] proportional to c's total positional score.

    The normalizer is n * |s|_1, so the probabilities always form a
    distribution.
    """
    if scores.m != profile.m:
        raise ValidationError(f"score vector length {scores.m} != m = {profile.m}")
    ranks = profile.rank_matrix()
    totals = scores.scores[ranks].sum(axis=0)
    return Lottery(totals / (profile.n * scores.l1_norm))


def random_dictatorship(profile: Profile) -> Lottery:
    return rsr_lottery(profile, ScoreVector.plurality(profile.m))


def harmonic_lottery(profile: Profile) -> Lottery:
    return rsr_lottery(profile, ScoreVector.harmonic(profile.m))


def uniform_lottery(profile: Profile) -> Lottery:
    return Lottery.uniform(profile.m)
