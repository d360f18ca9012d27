import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from measuregraph.degree_sequences import (
    DegreeSequence,
    conjugate,
    first_violation,
    is_graphical,
    realize_degree_sequence,
)
from measuregraph.errors import ValidationError
from oracles import nonincreasing_sequences, simple_graph_sequences, square_01_sequences, symmetric_01_sequences


def test_conjugate_examples():
    assert conjugate((2, 2, 2)) == (3, 3, 0)
    assert conjugate((0, 0)) == (0, 0)
    assert conjugate((3, 1, 1, 1)) == (4, 1, 1, 0)


def test_is_graphical_examples():
    assert is_graphical((2, 2, 2), "EG")
    assert not is_graphical((3, 3, 1, 1), "EG")
    assert "k=2" in first_violation((3, 3, 1, 1), "EG")
    assert is_graphical((3, 1), "CM")
    assert not is_graphical((3, 1), "EG")


def test_unsorted_and_unknown():
    with pytest.raises(ValidationError):
        is_graphical((1, 2), "EG")
    with pytest.raises(ValidationError):
        is_graphical((2, 1, 1), "XX")
    with pytest.raises(ValidationError):
        DegreeSequence((-1,))


@pytest.mark.parametrize("n", range(1, 7))
def test_erdos_gallai_matches_brute_force(n):
    truth = simple_graph_sequences(n)
    for seq in nonincreasing_sequences(n, min(5, n - 1) if n > 1 else 0):
        assert is_graphical(seq, "EG") == (seq in truth), seq


@pytest.mark.parametrize("n", range(1, 7))
def test_gale_ryser_matches_symmetric_brute_force(n):
    truth = symmetric_01_sequences(n)
    for seq in nonincreasing_sequences(n, min(5, n)):
        assert is_graphical(seq, "GR") == (seq in truth), seq


@pytest.mark.parametrize("n", range(1, 5))
def test_gale_ryser_matches_square_matrix_brute_force(n):
    truth = square_01_sequences(n)
    for seq in nonincreasing_sequences(n, n):
        assert is_graphical(seq, "GR") == (seq in truth), seq


def test_realize_examples():
    tri = realize_degree_sequence((2, 2, 2))
    assert np.array_equal(tri.adjacency, np.ones((3, 3)) - np.eye(3))
    match = realize_degree_sequence((1, 1, 1, 1))
    assert np.array_equal(match.out_degrees(), [1, 1, 1, 1])
    assert match.edge_count(normalized=True) == 2


def test_configuration_conserves_stubs():
    for seed in range(1000):
        g = realize_degree_sequence((3, 3, 2, 2), "configuration", seed)
        assert np.array_equal(g.out_degrees(), [3, 3, 2, 2])
        # loops count 2 on the diagonal, so the total weight is the stub count
        assert g.total_weight() == 10


@pytest.mark.parametrize("n", range(1, 7))
def test_every_realization_has_exact_degrees(n):
    for seq in nonincreasing_sequences(n, min(5, n)):
        if is_graphical(seq, "EG"):
            g = realize_degree_sequence(seq, "simple")
            assert np.array_equal(g.out_degrees(), seq)
            assert set(np.unique(g.adjacency)) <= {0.0, 1.0}
        if is_graphical(seq, "GR"):
            g = realize_degree_sequence(seq, "bipartite-flow")
            assert np.array_equal(g.adjacency, g.adjacency.T)
            assert np.array_equal(g.out_degrees(), seq), seq
            assert set(np.unique(g.adjacency)) <= {0.0, 1.0}


def test_realize_rejects_non_graphical():
    with pytest.raises(ValidationError):
        realize_degree_sequence((3, 3, 1, 1), "simple")
    with pytest.raises(ValidationError):
        realize_degree_sequence((3,), "configuration")


@given(st.lists(st.integers(0, 8), min_size=1, max_size=12))
@settings(max_examples=100, deadline=None)
def test_eg_implies_cm_and_gr(vals):
    seq = tuple(sorted(vals, reverse=True))
    if is_graphical(seq, "EG"):
        assert is_graphical(seq, "CM")
        assert is_graphical(seq, "GR")


@given(st.lists(st.integers(0, 6), min_size=1, max_size=10))
@settings(max_examples=60, deadline=None)
def test_conjugate_of_conjugate(vals):
    seq = tuple(sorted(vals, reverse=True))
    n = len(seq)
    star = conjugate(seq)
    # the conjugate of the conjugate recovers the entries that are at most n
    assert conjugate(star) == tuple(min(v, n) for v in seq)
