import math

import numpy.testing as npt
import pytest

from smoothed_lab import lemmalab
from smoothed_lab.bounds import DomainViolated, appendix_bound
from smoothed_lab.lemmalab import (DEFAULTS, LEMMA_IDS, UnknownLemma,
                                   check_lemma, sample_pareto_tail)
from smoothed_lab.streams import RandomStream


def test_lemma_registry_consistent():
    assert len(LEMMA_IDS) == 13
    assert set(LEMMA_IDS) == set(DEFAULTS)


def test_pareto_tail_sampler():
    with pytest.raises(DomainViolated):
        sample_pareto_tail(0.0, RandomStream(0, 0))
    stream = RandomStream(1, 0)
    draws = [sample_pareto_tail(1.0, stream) for _ in range(100000)]
    assert min(draws) >= 1.0
    hits = sum(1 for d in draws if d >= 10.0) / len(draws)
    assert abs(hits - 0.1) < 0.005


def test_unknown_lemma_and_bad_arguments():
    with pytest.raises(UnknownLemma):
        check_lemma("fermat_last")
    with pytest.raises(DomainViolated):
        check_lemma("gauss_tail", {"bogus": 1.0})
    with pytest.raises(DomainViolated):
        check_lemma("gauss_tail", trials=0)
    with pytest.raises(DomainViolated):
        check_lemma("gauss_tail", confidence=1.0)


def test_domain_violations_inside_runners():
    with pytest.raises(DomainViolated):
        check_lemma("gauss_tail", {"k": 0.5}, trials=10)
    with pytest.raises(DomainViolated):
        check_lemma("recip_one_norm", {"n": 1}, trials=10)
    with pytest.raises(DomainViolated):
        check_lemma("comb_log_lin", {"x": 0.5}, trials=10)
    with pytest.raises(DomainViolated):
        check_lemma("bigLk", {"k": 10}, trials=10)
    with pytest.raises(DomainViolated):
        check_lemma("bigLk", {"x": 0.5}, trials=10)
    with pytest.raises(DomainViolated):
        check_lemma("max_gauss", {"n": 2.5}, trials=10)


def test_check_lemma_deterministic():
    a = check_lemma("dist_to_plane", trials=2000, seed=5)
    b = check_lemma("dist_to_plane", trials=2000, seed=5)
    assert a == b
    assert a.trials == 2000
    assert a.confidence == 0.999


def test_gauss_tail_against_exact_probability():
    res = check_lemma("gauss_tail", {"k": 2.0}, trials=100000, seed=3)
    assert res.passed
    assert res.bound == appendix_bound("gauss_tail", k=2.0)
    assert abs(res.observed - 0.02275) < 0.002


def test_max_gauss_pair_mean():
    res = check_lemma("max_gauss", {"n": 2}, trials=100000, seed=4)
    assert res.passed
    npt.assert_allclose(res.bound, 1.752962072051556, rtol=1e-13)
    assert abs(res.observed - 2.0 / math.sqrt(math.pi)) < 0.01


def test_circle_coordinate_versus_gaussian():
    res = check_lemma("rand_sphere", {"d": 2, "c": 1.0}, trials=100000,
                      seed=6)
    assert res.passed
    assert res.bound == 0.0
    assert abs(res.observed - (0.5 - 0.31731)) < 0.01


def test_tight_expected_log_ratio():
    res = check_lemma("comb_lin_log", trials=200000, seed=7)
    assert res.passed
    npt.assert_allclose(res.bound, math.log(2.0) + 1.0, rtol=1e-13)
    assert abs(res.observed - (math.log(2.0) + 1.0)) < 0.02


def test_matrix_lemmas_smoke():
    for lemma in ("projection", "schur_vector", "vector_ratio", "bigLk"):
        res = check_lemma(lemma, trials=400, seed=8)
        assert res.passed, lemma
        assert res.excluded == 0
        assert res.trials == 400
