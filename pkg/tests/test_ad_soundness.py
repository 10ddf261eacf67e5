"""Exact jets versus central finite differences on random expression trees."""

from conftest import jet_vs_finite_difference


def test_random_trees_match_finite_differences():
    worst = jet_vs_finite_difference(n_trees=30, seed=7)
    assert worst < 1e-5
