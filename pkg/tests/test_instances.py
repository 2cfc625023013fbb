"""Generator families: reproducibility, validity, and the proof constructions."""

import numpy as np
import pytest

from linchoice import Lottery, ValidationError, min_favorite_utility, validate_candidates, validate_voters
from linchoice.distortion import empirical_distortion
from linchoice.instances import (
    GeneratorSpec,
    gen_clone_test,
    gen_plurality_worstcase,
    gen_random,
    gen_randomized_lb,
    gen_rd_worstcase,
    ingest_ratings,
)
from linchoice.rules import plurality, random_dictatorship


def test_gen_random_reproducible():
    a = gen_random(n=6, m=5, d=4, seed=123)
    b = gen_random(n=6, m=5, d=4, seed=123)
    np.testing.assert_array_equal(a.candidates.vectors, b.candidates.vectors)
    np.testing.assert_array_equal(a.voters.vectors, b.voters.vectors)
    assert a.profile == b.profile
    c = gen_random(n=6, m=5, d=4, seed=124)
    assert not np.array_equal(a.candidates.vectors, c.candidates.vectors)


def test_gen_random_passes_model_checks():
    for seed in range(8):
        inst = gen_random(n=7, m=6, d=5, seed=seed)
        assert validate_candidates(inst.candidates).ok
        assert validate_voters(inst.voters, inst.candidates).ok
        assert min_favorite_utility(inst.voters, inst.candidates) >= 1 / 5 - 1e-12


def test_generator_spec_dispatch():
    inst = GeneratorSpec(family="random", n=4, m=3, d=2, seed=9).generate()
    assert inst.n == 4 and inst.m == 3 and inst.d == 2
    with pytest.raises(ValidationError):
        GeneratorSpec(family="bogus")


def test_plurality_worstcase_exact_value():
    inst = gen_plurality_worstcase(10, 5, 5)
    winner = plurality(inst.profile)
    assert winner == 0
    value = empirical_distortion(Lottery.point_mass(winner, inst.m), inst.utilities)
    assert value == pytest.approx(21.0, abs=1e-9)
    assert inst.meta["expected_distortion"] == pytest.approx(21.0)


def test_plurality_worstcase_small_branch():
    inst = gen_plurality_worstcase(6, 3, 2)
    value = empirical_distortion(Lottery.point_mass(plurality(inst.profile), 3), inst.utilities)
    assert value == pytest.approx(5.0, abs=1e-9)


def test_plurality_worstcase_n_below_m():
    inst = gen_plurality_worstcase(4, 8, 3)
    assert plurality(inst.profile) == 0
    # one uniform voter: distortion (n - 1 + 1/d) / (1/d)
    value = empirical_distortion(Lottery.point_mass(0, 8), inst.utilities)
    assert value == pytest.approx((4 - 1 + 1 / 3) * 3, abs=1e-9)


def test_plurality_worstcase_parameter_errors():
    with pytest.raises(ValidationError):
        gen_plurality_worstcase(3, 3, 2)  # n too small
    with pytest.raises(ValidationError):
        gen_plurality_worstcase(20, 5, 5)  # tie-break would dethrone the spread candidate
    with pytest.raises(ValidationError):
        gen_plurality_worstcase(5, 8, 3)  # n < m without divisibility


def test_rd_worstcase_distortion_near_d_minus_one():
    inst = gen_rd_worstcase(10, group_size=4, epsilon_tiebreak=1e-4)
    value = empirical_distortion(random_dictatorship(inst.profile), inst.utilities)
    assert value == pytest.approx(9.0, rel=0.01)


def test_rd_worstcase_welfare_split():
    d, g = 6, 5
    inst = gen_rd_worstcase(d, group_size=g, epsilon_tiebreak=1e-3)
    n = inst.n
    welfare = inst.utilities.utilities.sum(axis=0)
    assert welfare[d - 1] == pytest.approx(n * (0.5 - 1e-3))
    rd_welfare = float(random_dictatorship(inst.profile).probabilities @ welfare)
    assert rd_welfare == pytest.approx(n * (0.5 + 1e-3) / (d - 1))


def test_rd_worstcase_degenerate_d2():
    inst = gen_rd_worstcase(2)
    lot = random_dictatorship(inst.profile)
    np.testing.assert_allclose(lot.probabilities, [1.0, 0.0])
    assert empirical_distortion(lot, inst.utilities) == pytest.approx(1.0)


def test_randomized_lb_validity_and_pigeonhole():
    inst = gen_randomized_lb(16, 16, 16)
    assert validate_candidates(inst.candidates).ok
    assert validate_voters(inst.voters, inst.candidates).ok
    assert min_favorite_utility(inst.voters, inst.candidates, check_expressiveness=True) >= 1 / 16 - 1e-12
    # any lottery puts at most 1/4 on some group favorite
    probs = random_dictatorship(inst.profile).probabilities
    assert probs[:4].min() <= 0.25 + 1e-12


def test_randomized_lb_divisibility_error():
    with pytest.raises(ValidationError):
        gen_randomized_lb(15, 16, 16)
    with pytest.raises(ValidationError):
        gen_randomized_lb(16, 16, 10)  # m < d


def test_clone_test_single_candidate():
    base = gen_random(n=3, m=1, d=2, seed=0)
    cloned = gen_clone_test(base, 0)
    assert cloned.m == 2
    for rec in cloned.profile.records:
        assert rec.order == (0, 1)


def test_clone_inserted_directly_below():
    base = gen_random(n=6, m=5, d=3, seed=2)
    cloned = gen_clone_test(base, 3)
    np.testing.assert_array_equal(cloned.candidates.vectors[5], base.candidates.vectors[3])
    for rec in cloned.profile.records:
        order = list(rec.order)
        assert order.index(5) == order.index(3) + 1


def test_ingest_rank_one_matrix():
    inst = ingest_ratings(np.ones((4, 4)), 1, iterations=60, seed=3)
    np.testing.assert_allclose(inst.candidates.vectors, 1.0)
    np.testing.assert_allclose(inst.voters.vectors, 1.0)
    np.testing.assert_allclose(inst.utilities.utilities, 1.0)


def test_ingest_monotone_error_and_reproducible():
    rng = np.random.default_rng(5)
    ratings = rng.random((12, 8)) * 5
    ratings[rng.random((12, 8)) < 0.4] = np.nan
    a = ingest_ratings(ratings, 3, iterations=120, seed=7)
    errs = a.meta["nmf_errors"]
    assert all(b <= x * (1 + 1e-9) + 1e-12 for x, b in zip(errs, errs[1:]))
    b = ingest_ratings(ratings, 3, iterations=120, seed=7)
    np.testing.assert_array_equal(a.candidates.vectors, b.candidates.vectors)
    assert validate_candidates(a.candidates).ok
    assert validate_voters(a.voters).ok


def test_ingest_rejects_empty_and_negative():
    with pytest.raises(ValidationError):
        ingest_ratings(np.full((3, 3), np.nan), 2)
    with pytest.raises(ValidationError):
        ingest_ratings(np.array([[1.0, -2.0]]), 1)
