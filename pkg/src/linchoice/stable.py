"""Stable lotteries over fixed-size committees, and the two voting rules
built on them.

A distribution over size-k committees is stable when no challenger is
strictly preferred to the whole committee by more than n/k voters in
expectation. Exact mode enumerates all committees and solves one LP;
the heuristic mode for huge committee spaces plays a multiplicative-weights
adversary against greedy best-response committees. Either way the returned
lottery is re-certified by direct blocking-count evaluation on its support —
solver output is verified, never trusted.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import lp
from .errors import StabilityError, ValidationError
from .model import CandidateSet, Lottery, PairwisePrefs, Profile, Ranking
from .projection import uproj

EXACT_ENUMERATION_LIMIT = 200_000
CERT_TOL = 1e-6
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class CommitteeLottery:
    """A certified-stable distribution over size-k candidate committees."""

    k: int
    n_voters: int
    support: tuple[tuple[tuple[int, ...], float], ...]
    marginals: np.ndarray
    stability: float  # verified max over challengers of E|S_c(W)|

    def __post_init__(self):
        probs = np.array([p for _, p in self.support])
        if abs(probs.sum() - 1.0) > 1e-9 or np.any(probs < 0):
            raise ValidationError("committee probabilities do not form a distribution")
        if abs(self.marginals.sum() - self.k) > 1e-6:
            raise ValidationError(
                f"marginals sum to {self.marginals.sum():.9g}, expected k = {self.k}"
            )
        if self.stability > self.stability_bound + CERT_TOL:
            raise StabilityError(
                f"max expected blocking count {self.stability:.9g} exceeds n/k = {self.stability_bound:.9g}"
            )

    @property
    def stability_bound(self) -> float:
        return self.n_voters / self.k

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "support": [{"committee": list(w), "probability": p} for w, p in self.support],
            "marginals": self.marginals.tolist(),
            "stability": self.stability,
            "stability_bound": self.stability_bound,
        }


def blocking_count(committee, challenger: int, profile: Profile) -> int:
    """Number of voters strictly preferring the challenger to every committee member."""
    members = sorted(int(c) for c in committee)
    if challenger in members:
        return 0
    count = 0
    for rec in profile.records:
        if isinstance(rec, Ranking):
            pos = rec.position
            if pos[challenger] < min(pos[w] for w in members):
                count += 1
        else:
            if all(rec.prefers(challenger, w) for w in members):
                count += 1
    return count


def expected_blocking_counts(lottery: CommitteeLottery, profile: Profile) -> np.ndarray:
    """E_W |S_c(W)| per challenger, evaluated directly on the lottery support."""
    out = np.zeros(profile.m)
    for committee, prob in lottery.support:
        for c in range(profile.m):
            out[c] += prob * blocking_count(committee, c, profile)
    return out


def _blocking_matrix(profile: Profile, committees: np.ndarray) -> np.ndarray:
    """|S_c(W)| for every challenger (rows) and committee (columns)."""
    n_comm, k = committees.shape
    m = profile.m
    S = np.zeros((m, n_comm), dtype=np.float64)
    if profile.all_rankings():
        ranks = profile.rank_matrix()
        chunk = max(1, 4_000_000 // (profile.n * k))
        for lo in range(0, n_comm, chunk):
            idx = committees[lo : lo + chunk]
            min_rank = ranks[:, idx].min(axis=2)  # (n, chunk)
            for c in range(m):
                S[c, lo : lo + idx.shape[0]] = (ranks[:, c][:, None] < min_rank).sum(axis=0)
    else:
        for j in range(n_comm):
            for c in range(m):
                S[c, j] = blocking_count(committees[j], c, profile)
    return S


def stable_lottery(profile: Profile, k: int, exact_limit: int = EXACT_ENUMERATION_LIMIT) -> CommitteeLottery:
    """Compute a stable lottery over size-k committees.

    k is capped at m. Exact mode (committee space up to ``exact_limit``)
    solves the min-max LP over all committees; larger spaces fall back to the
    multiplicative-weights heuristic. Both paths end with the same exhaustive
    certificate and fail loudly when it does not hold.
    """
    if k < 1:
        raise ValidationError(f"committee size must be positive, got {k}")
    m, n = profile.m, profile.n
    k = min(k, m)
    if math.comb(m, k) <= exact_limit:
        support = _stable_lottery_exact(profile, k)
    else:
        support = _stable_lottery_heuristic(profile, k)
    marginals = np.zeros(m)
    for committee, prob in support:
        for c in committee:
            marginals[c] += prob
    lottery = CommitteeLottery(
        k=k,
        n_voters=n,
        support=tuple(support),
        marginals=marginals,
        stability=0.0,
    )
    verified = float(expected_blocking_counts(lottery, profile).max())
    return CommitteeLottery(
        k=k, n_voters=n, support=lottery.support, marginals=marginals, stability=verified
    )


def _stable_lottery_exact(profile: Profile, k: int) -> list[tuple[tuple[int, ...], float]]:
    """minimize t s.t. S q <= n/k + t, q in the committee simplex."""
    m, n = profile.m, profile.n
    committees = np.array(list(itertools.combinations(range(m), k)), dtype=np.int64)
    S = _blocking_matrix(profile, committees)
    n_comm = committees.shape[0]
    nvars = n_comm + 1  # q, then t
    objective = np.zeros(nvars)
    objective[-1] = 1.0
    rows: list[lp.Constraint] = []
    for c in range(m):
        coefs = np.concatenate([S[c], [-1.0]])
        rows.append((coefs, lp.LESS, n / k))
    simplex = np.concatenate([np.ones(n_comm), [0.0]])
    rows.append((simplex, lp.EQUAL, 1.0))
    bounds = [(0.0, np.inf)] * n_comm + [(-np.inf, np.inf)]
    sol = lp.solve(lp.LinearProgram(objective, rows, bounds=bounds))
    if not sol.ok:
        raise StabilityError(f"stable-lottery LP ended with status {sol.status}")
    q = sol.point[:n_comm]
    keep = np.flatnonzero(q > PROB_FLOOR)
    total = q[keep].sum()
    return [(tuple(int(c) for c in committees[j]), float(q[j] / total)) for j in keep]


def _stable_lottery_heuristic(
    profile: Profile, k: int, rounds: int = 400
) -> list[tuple[tuple[int, ...], float]]:
    """Multiplicative-weights adversary over challengers vs greedy committees.

    Each round the adversary weights challengers; the response committee is
    grown greedily to maximize the weight of covered (voter, challenger)
    pairs, where a voter is covered against c once some member is weakly
    preferred to c. The iterate average is returned for certification.
    """
    if not profile.all_rankings():
        raise ValidationError("heuristic stable lotteries require total orders")
    m, n = profile.m, profile.n
    ranks = profile.rank_matrix()
    eta = math.sqrt(math.log(m) / rounds)
    weights = np.full(m, 1.0 / m)
    tally: dict[tuple[int, ...], int] = {}
    for _ in range(rounds):
        committee = _greedy_committee(ranks, weights, k)
        key = tuple(sorted(committee))
        tally[key] = tally.get(key, 0) + 1
        min_rank = ranks[:, committee].min(axis=1)
        blocking = (ranks < min_rank[:, None]).sum(axis=0).astype(np.float64)
        weights *= np.exp(eta * blocking / n)
        weights /= weights.sum()
    return [(w, cnt / rounds) for w, cnt in sorted(tally.items())]


def _greedy_committee(ranks: np.ndarray, weights: np.ndarray, k: int) -> list[int]:
    n, m = ranks.shape
    by_position = np.argsort(ranks, axis=1)  # candidate each voter places at position r
    mass = weights[by_position]  # (n, m): challenger weight at each rank slot
    suffix = np.zeros((n, m + 1))
    suffix[:, :m] = np.cumsum(mass[:, ::-1], axis=1)[:, ::-1]
    best_rank = np.full(n, m, dtype=np.int64)
    voters = np.arange(n)
    chosen: list[int] = []
    available = np.ones(m, dtype=bool)
    for _ in range(k):
        gains = np.full(m, -1.0)
        covered_floor = suffix[voters, best_rank]
        for w in np.flatnonzero(available):
            r = ranks[:, w]
            gain = suffix[voters, np.minimum(r, best_rank)] - covered_floor
            gains[w] = float(gain.sum())
        pick = int(np.argmax(gains))
        chosen.append(pick)
        available[pick] = False
        best_rank = np.minimum(best_rank, ranks[:, pick])
    return chosen


def linear_stable_lottery_rule(
    profile: Profile,
    candidates: CandidateSet,
    k_override: int | None = None,
) -> Lottery:
    """Half committee-marginal mass (committees of size ~sqrt(d)), half KL projection.

    Marginals are divided by the realized integer k, so the mixture is a true
    distribution even when sqrt(d) is not an integer.
    """
    d = candidates.d
    k = k_override if k_override is not None else math.isqrt(d - 1) + 1  # ceil(sqrt(d))
    k = min(k, candidates.m)
    committee_part = stable_lottery(profile, k)
    projection_part = uproj(candidates)
    probs = committee_part.marginals / (2 * committee_part.k) + projection_part.lottery.probabilities / 2
    return Lottery(probs)


def pure_stable_lottery_rule(profile: Profile, d: int, k_override: int | None = None) -> Lottery:
    """Committee-marginal lottery over committees of size ~2d (ordinal-only)."""
    if d < 1:
        raise ValidationError("dimension parameter must be positive")
    k = k_override if k_override is not None else min(2 * d, profile.m)
    committee_part = stable_lottery(profile, k)
    return Lottery(committee_part.marginals / committee_part.k)
