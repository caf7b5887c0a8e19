"""Acceptance battery: one test and one printed verdict line per criterion."""

import pytest

from smoothed_lab import suite


def _run(number):
    results = suite.run_all(only={number})
    assert len(results) == 1
    res = results[0]
    verdict = "PASS" if res.passed else "FAIL"
    print(f"criterion {res.number} [{verdict}] {res.name}: {res.detail} "
          f"({res.elapsed:.1f}s)")
    assert res.passed, f"criterion {res.number} {res.name}: {res.detail}"


def test_criterion_1_inverse_norm_tail():
    _run(1)


def test_criterion_2_condition_tail_shifted_center():
    _run(2)


def test_criterion_3_growth_tails():
    _run(3)


def test_criterion_4_symmetric_sparse_suite():
    _run(4)


def test_criterion_5_precision_bits():
    _run(5)


def test_criterion_6_lemma_battery():
    _run(6)


def test_criterion_7_elimination_identities():
    _run(7)


def test_criterion_8_gallery_robustness():
    _run(8)


def test_criterion_9_report_determinism():
    _run(9)
