"""Instance generators: random synthetic families, the adversarial
constructions behind the worst-case bounds, and ratings-matrix ingestion.

Every generator is bit-reproducible from its parameters and seed, and emits
embeddings whose induced utilities are consistent with the emitted profile.
Worst-case families resolve utility ties adversarially (that is the point of
the constructions), so their profiles are weakly consistent with the
utilities rather than re-derivable by the fixed tie-break.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LinChoiceError, ValidationError
from .model import (
    CandidateSet,
    Instance,
    PairwisePrefs,
    Profile,
    Ranking,
    UtilityProfile,
    VoterSet,
    utilities_to_profile,
)

FAMILIES = ("random", "plurality-worst", "rd-worst", "randomized-lb", "clone-test")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    n: int = 20
    m: int = 10
    d: int = 5
    seed: int = 0
    dirichlet_alpha: float = 1.0
    epsilon_tiebreak: float = 1e-4
    group_size: int = 5
    k_star: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}; choose from {FAMILIES}")

    def generate(self) -> Instance:
        if self.family == "random":
            return gen_random(self)
        if self.family == "plurality-worst":
            return gen_plurality_worstcase(self.n, self.m, self.d)
        if self.family == "rd-worst":
            return gen_rd_worstcase(self.d, self.group_size, self.epsilon_tiebreak)
        if self.family == "randomized-lb":
            return gen_randomized_lb(self.n, self.d, self.m, k_star=self.k_star)
        base = gen_random(self)
        return gen_clone_test(base, 0)


def gen_random(spec: GeneratorSpec | None = None, **kwargs) -> Instance:
    """Dirichlet candidates on the simplex; voters as random convex combinations.

    Combination weights are stored as expressiveness witnesses, utilities are
    the exact inner products, and the profile is induced with the fixed
    tie-break, so the instance passes every model check by construction.
    """
    if spec is None:
        spec = GeneratorSpec(family="random", **kwargs)
    rng = np.random.default_rng(spec.seed)
    cands = CandidateSet(rng.dirichlet(np.full(spec.d, spec.dirichlet_alpha), size=spec.m))
    weights = rng.dirichlet(np.ones(spec.m), size=spec.n)
    voters = VoterSet(weights @ cands.vectors, weights=weights)
    utilities = UtilityProfile(voters.vectors @ cands.vectors.T)
    profile = utilities_to_profile(utilities)
    meta = {"family": "random", "n": spec.n, "m": spec.m, "d": spec.d, "alpha": spec.dirichlet_alpha}
    return Instance(cands, profile, voters=voters, utilities=utilities, seed=spec.seed, meta=meta)


def gen_plurality_worstcase(n: int, m: int, d: int) -> Instance:
    """The instance on which plurality pays its full welfare penalty.

    One candidate spreads uniformly over the coordinates the aligned voters
    ignore; the rest sit on the first basis vector. Two uniform voters rank
    the spread candidate first; the remaining voters split their first-place
    votes over the clones, so the spread candidate survives the tie-break
    with expected empirical distortion (n - 2 + 2/d) / (2/d) when n >= m.
    """
    if n < 4 or m < 3 or d < 2:
        raise ValidationError("plurality worst case needs n >= 4, m >= 3, d >= 2")
    spread = np.concatenate([[0.0], np.full(d - 1, 1.0 / (d - 1))])
    cands = CandidateSet(np.vstack([spread, np.tile(np.eye(d)[0], (m - 1, 1))]))
    mu = np.full(d, 1.0 / d)
    if n >= m:
        n_aligned = 2
        if n - 2 > 2 * (m - 1):
            raise ValidationError(
                "plurality worst case needs n - 2 <= 2(m - 1) so the spread "
                "candidate survives the tie-break"
            )
    else:
        if m % n != 0:
            raise ValidationError("the n < m branch requires n to divide m")
        n_aligned = n // m + 1  # one voter below m
    voters = VoterSet(np.vstack([np.tile(mu, (n_aligned, 1)), np.tile(np.eye(d)[0], (n - n_aligned, 1))]))
    utilities = UtilityProfile(voters.vectors @ cands.vectors.T)
    records = []
    for _ in range(n_aligned):
        records.append(list(range(m)))
    others = list(range(1, m))
    for i in range(n - n_aligned):
        top = others[i % len(others)]
        records.append([top] + [c for c in others if c != top] + [0])
    profile = Profile(records, m=m)
    g = n_aligned
    expected = (n - g + g / d) / (g / d)
    meta = {"family": "plurality-worst", "n": n, "m": m, "d": d, "expected_distortion": expected}
    return Instance(cands, profile, voters=voters, utilities=utilities, meta=meta)


def gen_rd_worstcase(d: int, group_size: int = 5, epsilon_tiebreak: float = 1e-4) -> Instance:
    """Voter groups split between a private favorite and one shared runner-up.

    Candidates are the basis of R^d; group i's voters sit at
    (1/2 + eps) e_i + (1/2 - eps) e_{d-1}, so random dictatorship spreads mass
    over the d - 1 favorites while the shared runner-up collects half of
    everyone's utility: empirical distortion about d - 1.
    """
    if d < 2:
        raise ValidationError("need d >= 2")
    if not 0.0 < epsilon_tiebreak < 0.1:
        raise ValidationError("tie perturbation must lie in (0, 0.1)")
    eps = epsilon_tiebreak
    cands = CandidateSet(np.eye(d))
    rows = []
    for i in range(d - 1):
        v = np.zeros(d)
        v[i] = 0.5 + eps
        v[d - 1] = 0.5 - eps
        rows.append(np.tile(v, (group_size, 1)))
    voters = VoterSet(np.vstack(rows))
    utilities = UtilityProfile(voters.vectors @ cands.vectors.T)
    profile = utilities_to_profile(utilities)
    expected = (d - 1) * (0.5 - eps) / (0.5 + eps) if d > 2 else 1.0
    meta = {
        "family": "rd-worst",
        "d": d,
        "group_size": group_size,
        "epsilon": eps,
        "expected_distortion": max(expected, 1.0),
    }
    return Instance(cands, profile, voters=voters, utilities=utilities, meta=meta)


def gen_randomized_lb(n: int, d: int, m: int, k_star: int = 0) -> Instance:
    """Equal voter groups with distinct favorites; one group secretly aligned.

    ceil(sqrt(d)) groups each top-rank their own basis candidate. The group
    k_star sits exactly on its favorite; everyone else is uniform, so no
    lottery can cover all favorites at once. Candidates are basis vectors
    (the surplus beyond d collapsing onto the second coordinate would break
    expressiveness for the uniform voters, so surplus candidates repeat e_2
    only once every coordinate is covered).
    """
    if m < d:
        raise ValidationError("need m >= d")
    kg = math.isqrt(d - 1) + 1 if d > 1 else 1
    if n % kg != 0:
        raise ValidationError(f"need ceil(sqrt(d)) = {kg} to divide n = {n}")
    if not 0 <= k_star < kg:
        raise ValidationError(f"k_star must lie in [0, {kg})")
    vectors = np.vstack([np.eye(d), np.tile(np.eye(d)[1], (m - d, 1))])
    cands = CandidateSet(vectors)
    group = n // kg
    mu = np.full(d, 1.0 / d)
    voter_rows = []
    records = []
    for k in range(kg):
        vec = np.eye(d)[k_star] if k == k_star else mu
        utils = vectors @ vec
        rest = sorted((c for c in range(m) if c != k), key=lambda c: (-utils[c], c))
        for _ in range(group):
            voter_rows.append(vec)
            records.append([k] + rest)
    voters = VoterSet(np.array(voter_rows))
    utilities = UtilityProfile(voters.vectors @ cands.vectors.T)
    profile = Profile(records, m=m)
    uw1 = 1.0 / kg + (1.0 - 1.0 / kg) / d
    uw2 = 1.0 / d
    bound = uw1 / (uw1 / kg + uw2 * (1.0 - 1.0 / kg))
    meta = {"family": "randomized-lb", "n": n, "m": m, "d": d, "k_star": k_star, "proof_bound": bound}
    return Instance(cands, profile, voters=voters, utilities=utilities, meta=meta)


def gen_clone_test(base: Instance, candidate: int) -> Instance:
    """Append an exact duplicate of one candidate, ranked directly below it."""
    if not 0 <= candidate < base.m:
        raise ValidationError(f"candidate index {candidate} out of range")
    clone = base.m
    vectors = np.vstack([base.candidates.vectors, base.candidates.vectors[candidate]])
    cands = CandidateSet(vectors)
    records = []
    for rec in base.profile.records:
        if isinstance(rec, Ranking):
            order = []
            for c in rec.order:
                order.append(c)
                if c == candidate:
                    order.append(clone)
            records.append(Ranking(order))
        else:
            pairs = list(rec.pairs)
            pairs.append((candidate, clone))
            for a, b in rec.pairs:
                if a == candidate:
                    pairs.append((clone, b))
                if b == candidate:
                    pairs.append((a, clone))
            records.append(PairwisePrefs(pairs))
    profile = Profile(records, m=base.m + 1)
    utilities = None
    if base.utilities is not None:
        u = base.utilities.utilities
        utilities = UtilityProfile(np.hstack([u, u[:, candidate : candidate + 1]]))
    meta = dict(base.meta)
    meta.update({"cloned_from": candidate, "clone_index": clone})
    return Instance(cands, profile, voters=base.voters, utilities=utilities, seed=base.seed, meta=meta)


def ingest_ratings(
    ratings: np.ndarray,
    d: int,
    iterations: int = 500,
    seed: int = 0,
) -> Instance:
    """Factor a partially observed ratings matrix into simplex embeddings.

    Nonnegative matrix factorization by multiplicative updates, masked to the
    observed entries; factor rows are then rescaled onto the simplex and the
    utilities recomputed as inner products. The masked reconstruction error
    must be nonincreasing across updates (a property of the update rule) and
    is kept in the instance metadata.
    """
    X = np.asarray(ratings, dtype=np.float64)
    if X.ndim != 2 or X.size == 0:
        raise ValidationError("ratings must be a nonempty 2-d matrix")
    if d < 1:
        raise ValidationError("need d >= 1")
    mask = np.isfinite(X)
    if not mask.any():
        raise ValidationError("ratings contain no observed entries")
    observed = np.where(mask, X, 0.0)
    if observed.min() < 0:
        raise ValidationError("observed ratings must be nonnegative")
    n, m = X.shape
    rng = np.random.default_rng(seed)
    tiny = 1e-12
    W = rng.uniform(0.1, 1.0, size=(n, d))
    H = rng.uniform(0.1, 1.0, size=(d, m))
    errors = []
    for _ in range(iterations):
        WH = np.where(mask, W @ H, 0.0)
        W *= (observed @ H.T) / (WH @ H.T + tiny)
        WH = np.where(mask, W @ H, 0.0)
        H *= (W.T @ observed) / (W.T @ WH + tiny)
        err = float(np.linalg.norm(np.where(mask, X - W @ H, 0.0)))
        if errors and err > errors[-1] * (1 + 1e-9) + 1e-12:
            raise LinChoiceError(
                f"masked reconstruction error increased ({errors[-1]:.6g} -> {err:.6g})"
            )
        errors.append(err)
    cand_rows = H.T
    row_sums = cand_rows.sum(axis=1)
    if np.any(row_sums <= tiny):
        raise ValidationError(f"candidate factor row {int(np.argmax(row_sums <= tiny))} is zero")
    cands = CandidateSet(cand_rows / row_sums[:, None])
    voter_sums = W.sum(axis=1)
    if np.any(voter_sums <= tiny):
        raise ValidationError(f"voter factor row {int(np.argmax(voter_sums <= tiny))} is zero")
    voters = VoterSet(W / voter_sums[:, None])
    utilities = UtilityProfile(voters.vectors @ cands.vectors.T)
    profile = utilities_to_profile(utilities)
    meta = {
        "family": "ingest",
        "d": d,
        "iterations": iterations,
        "nmf_errors": errors,
    }
    return Instance(cands, profile, voters=voters, utilities=utilities, seed=seed, meta=meta)
