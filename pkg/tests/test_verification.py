import numpy as np
import pytest

from measuregraph.errors import ValidationError
from measuregraph.graph_generation import LabeledGraph, generate
from measuregraph.model import spec_from_flags
from measuregraph.verification import generate_many, thread_count, verify, verify_graphs


@pytest.fixture(scope="module")
def er_spec():
    return spec_from_flags("dirac:10", "leb", "bernoulli:constant:0.3")


def test_er_all_quantities_concordant(er_spec):
    rows = verify(er_spec, 10_000, 11, ("edge_count", "edge_weight", "mean_degree", "active_vertices", "triangle"))
    assert {r.quantity for r in rows} == {"edge_count", "edge_weight", "mean_degree", "active_vertices", "triangle"}
    # 45 unordered pairs at p = 0.3, stored both ways
    assert next(r for r in rows if r.quantity == "edge_count").analytic == pytest.approx(2 * 45 * 0.3)
    assert all(abs(r.z) <= 4 for r in rows)


def test_zero_kernel_is_exactly_zero():
    spec = spec_from_flags("poisson:5", "leb", "bernoulli:constant:0")
    for r in verify(spec, 200, 0, ("edge_count", "edge_weight", "active_vertices")):
        assert r.analytic == 0 and r.mc_mean == 0 and r.z == 0


def test_replication_seeds_match_generate(er_spec):
    graphs = generate_many(er_spec, 5, 40)
    for i, g in enumerate(graphs):
        assert np.array_equal(g.adjacency, generate(er_spec, 40 + i).adjacency)
    threaded = generate_many(er_spec, 5, 40, threads=3)
    assert all(np.array_equal(a.adjacency, b.adjacency) for a, b in zip(graphs, threaded))


def test_threads_do_not_change_results(er_spec):
    a = verify(er_spec, 300, 5, threads=1)
    b = verify(er_spec, 300, 5, threads=4)
    assert [r.mc_mean for r in a] == [r.mc_mean for r in b]


def test_thread_env_cap(monkeypatch):
    monkeypatch.setenv("MEASUREGRAPH_THREADS", "1")
    assert thread_count(8) == 1
    monkeypatch.setenv("MEASUREGRAPH_THREADS", "x")
    with pytest.raises(ValidationError):
        thread_count()


def test_verify_graphs_round_trip(er_spec):
    graphs = [LabeledGraph.from_json(g.to_json()) for g in generate_many(er_spec, 2000, 0)]
    rows = verify_graphs(er_spec, graphs)
    assert all(abs(r.z) <= 4 for r in rows)


def test_verify_rejects_bad_input(er_spec):
    with pytest.raises(ValidationError):
        verify(er_spec, 1)
    with pytest.raises(ValidationError):
        verify(er_spec, 10, quantities=("volume",))
    with pytest.raises(ValidationError):
        verify(spec_from_flags("dirac:4", "leb", "digraphon:0.1:0.2"), 10, quantities=("triangle",))
    with pytest.raises(ValidationError):
        verify_graphs(er_spec, [])
