"""Committee lotteries, their stability certificates, and the LSLR/PSLR rules."""

import math

import numpy as np
import pytest

from linchoice import CandidateSet, Profile, StabilityError, ValidationError
from linchoice.projection import uproj
from linchoice.stable import (
    CommitteeLottery,
    blocking_count,
    expected_blocking_counts,
    linear_stable_lottery_rule,
    pure_stable_lottery_rule,
    stable_lottery,
)


def random_profile(rng, n, m):
    return Profile([rng.permutation(m) for _ in range(n)], m=m)


# -- blocking counts -----------------------------------------------------------


def test_blocking_count_full_committee_is_zero():
    prof = Profile([[0, 1, 2], [2, 0, 1]])
    for c in range(3):
        assert blocking_count((0, 1, 2), c, prof) == 0


def test_blocking_count_opposite_tops():
    prof = Profile([[0, 1], [1, 0]])
    assert blocking_count((0,), 1, prof) == 1
    assert blocking_count((1,), 0, prof) == 1


def test_blocking_count_committee_of_tops():
    prof = Profile([[0, 2, 1], [2, 1, 0], [0, 1, 2]])
    committee = tuple(set(prof.top_choices()))
    for c in range(3):
        assert blocking_count(committee, c, prof) == 0


def test_blocking_count_pairwise_records():
    from linchoice import PairwisePrefs

    prof = Profile([PairwisePrefs([(2, 0), (2, 1), (0, 1)])], m=3)
    assert blocking_count((0,), 2, prof) == 1
    assert blocking_count((0, 2), 1, prof) == 0


# -- stable lotteries ----------------------------------------------------------


def test_full_committee_point_mass():
    prof = Profile([[0, 1, 2], [2, 1, 0]])
    lot = stable_lottery(prof, 3)
    assert lot.support == (((0, 1, 2), 1.0),)
    assert lot.stability == 0.0


def test_two_voter_opposite_tops_uniform():
    # enumeration oracle: W={0} has S_1=1, W={1} has S_0=1, so the minimax
    # mixture is the coin flip with expected blocking 0.5 on each side
    prof = Profile([[0, 1], [1, 0]])
    lot = stable_lottery(prof, 1)
    np.testing.assert_allclose(lot.marginals, [0.5, 0.5], atol=1e-9)
    counts = expected_blocking_counts(lot, prof)
    np.testing.assert_allclose(counts, [0.5, 0.5], atol=1e-9)
    assert lot.stability == pytest.approx(0.5)
    assert lot.stability <= lot.stability_bound


def test_k_capped_at_m():
    prof = Profile([[1, 0], [0, 1]])
    lot = stable_lottery(prof, 5)
    assert lot.k == 2
    assert lot.support == (((0, 1), 1.0),)


def test_random_profiles_certified():
    rng = np.random.default_rng(0)
    for _ in range(12):
        n, m = 20, int(rng.integers(4, 11))
        k = int(rng.integers(2, 5))
        prof = random_profile(rng, n, m)
        lot = stable_lottery(prof, k)
        assert lot.stability <= n / k + 1e-6
        # certificate equals direct evaluation on the support
        direct = expected_blocking_counts(lot, prof).max()
        assert lot.stability == pytest.approx(direct, abs=1e-12)
        assert abs(lot.marginals.sum() - k) <= 1e-6


def test_certified_value_invariant_under_relabeling():
    rng = np.random.default_rng(3)
    prof = random_profile(rng, 10, 6)
    perm = rng.permutation(6)
    relabeled = Profile([[int(perm[c]) for c in rec.order] for rec in prof.records], m=6)
    a = stable_lottery(prof, 2)
    b = stable_lottery(relabeled, 2)
    assert a.stability == pytest.approx(b.stability, abs=1e-9)


def test_heuristic_mode_certifies():
    rng = np.random.default_rng(8)
    prof = random_profile(rng, 12, 30)
    assert math.comb(30, 6) > 200_000
    lot = stable_lottery(prof, 6)
    assert lot.stability <= 12 / 6 + 1e-6
    assert abs(lot.marginals.sum() - 6) <= 1e-6


def test_committee_lottery_invariants_enforced():
    with pytest.raises(ValidationError):
        CommitteeLottery(
            k=1, n_voters=2, support=(((0,), 0.7),), marginals=np.array([0.7, 0.0]), stability=0.0
        )
    with pytest.raises(StabilityError):
        CommitteeLottery(
            k=1, n_voters=2, support=(((0,), 1.0),), marginals=np.array([1.0, 0.0]), stability=5.0
        )


# -- the two rules ---------------------------------------------------------------


def test_lslr_single_candidate_point_mass():
    prof = Profile([[0]])
    cands = CandidateSet([[0.5, 0.5]])
    lot = linear_stable_lottery_rule(prof, cands)
    np.testing.assert_allclose(lot.probabilities, [1.0])


def test_lslr_mixture_of_its_components():
    rng = np.random.default_rng(14)
    d, m, n = 4, 6, 10
    cands = CandidateSet(rng.dirichlet(np.ones(d), size=m))
    prof = random_profile(rng, n, m)
    lot = linear_stable_lottery_rule(prof, cands)
    k = math.isqrt(d - 1) + 1
    committee = stable_lottery(prof, k)
    proj = uproj(cands)
    expected = committee.marginals / (2 * k) + proj.lottery.probabilities / 2
    np.testing.assert_allclose(lot.probabilities, expected, atol=1e-9)
    # committee part carries exactly half the mass
    assert (committee.marginals / (2 * k)).sum() == pytest.approx(0.5, abs=1e-9)


def test_lslr_k_ceiling():
    # d = 5 -> committees of size ceil(sqrt(5)) = 3
    rng = np.random.default_rng(2)
    cands = CandidateSet(rng.dirichlet(np.ones(5), size=8))
    prof = random_profile(rng, 6, 8)
    lot = linear_stable_lottery_rule(prof, cands)
    assert abs(lot.probabilities.sum() - 1.0) <= 1e-9
    lot_k = linear_stable_lottery_rule(prof, cands, k_override=2)
    assert abs(lot_k.probabilities.sum() - 1.0) <= 1e-9


def test_pslr_full_committee_uniform():
    # 2d >= m: the committee is everyone, so the lottery is uniform
    prof = Profile([[1, 0], [0, 1]])
    lot = pure_stable_lottery_rule(prof, 1)
    np.testing.assert_allclose(lot.probabilities, [0.5, 0.5], atol=1e-12)


def test_pslr_sums_to_one_exactly():
    rng = np.random.default_rng(4)
    prof = random_profile(rng, 12, 9)
    lot = pure_stable_lottery_rule(prof, 3)
    assert lot.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
