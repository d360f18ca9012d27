import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from measuregraph.analytics import (
    degree_distribution,
    degree_stats,
    edge_report,
    exponential_active_vertices,
    gc_threshold,
    giant_component,
    mean_active_vertices,
    mean_edge_terms,
    pgf_coefficients,
    separable_powerlaw_degree_pgf,
    triangle_mean,
)
from measuregraph.distributions import Binomial, Dirac, NegativeBinomial, Poisson, UnitInterval
from measuregraph.edge_transforms import (
    BernoulliTransform,
    BinomialTransform,
    Constant,
    Exponential,
    PowerLaw,
    WeightFunction,
    constant_digraphon,
)
from measuregraph.errors import TruncationWarning, ValidationError
from measuregraph.graph_generation import generate
from measuregraph.model import ModelSpec, spec_from_flags

LEB = UnitInterval()


def bern(kappa, kernel, **kw):
    return ModelSpec(kappa, LEB, BernoulliTransform(kernel), **kw)


def test_er_realized_degree_is_binomial():
    spec = bern(Dirac(20), Constant(0.3))
    law = degree_distribution(spec)
    probs = law.coefficients(19).probs
    assert np.max(np.abs(probs - stats.binom.pmf(np.arange(20), 19, 0.3))) < 1e-12
    ds = degree_stats(spec, 0.4, realized=True)
    assert (ds.mean, ds.var) == pytest.approx((19 * 0.3, 19 * 0.21))


def test_powerlaw_mean_degree_at_label():
    c, b, x = 30.0, 1.0, 0.35
    ds = degree_stats(bern(Poisson(c), PowerLaw(b)), x)
    assert ds.mean == pytest.approx(c / ((1 + b) * (1 + b * x) ** 2), rel=1e-12)


def test_zero_kernel_degree():
    spec = bern(Poisson(10), Constant(0.0))
    ds = degree_stats(spec, 0.5)
    assert (ds.mean, ds.var) == (0.0, 0.0)
    law = degree_distribution(spec)
    assert law.pgf(0.3) == pytest.approx(1.0)
    assert law.coefficients(5).probs[0] == pytest.approx(1.0)


def test_pgf_coefficient_examples():
    pois = pgf_coefficients(lambda t: np.exp(-2 * (1 - t)), 30).probs
    assert np.allclose(pois, stats.poisson.pmf(np.arange(31), 2), atol=1e-15)
    assert pois[0] == pytest.approx(0.135335, abs=1e-6)
    cube = pgf_coefficients(lambda t: t**3, 6).probs
    assert np.allclose(cube, [0, 0, 0, 1, 0, 0, 0], atol=1e-15)
    assert pgf_coefficients(lambda t: (0.5 + 0.5 * t) ** 4, 4).probs[2] == pytest.approx(0.375)


def test_pgf_coefficients_truncation_warning():
    with pytest.warns(TruncationWarning):
        co = pgf_coefficients(lambda t: np.exp(-20 * (1 - t)), 5)
    assert co.deficit > 0.5


def test_separable_powerlaw_pgf_closed_form():
    c, b = 25.0, 1.0
    law = degree_distribution(bern(Poisson(c), PowerLaw(b)), realized=False)
    for t in (0.0, 0.3, 0.8, 1.0):
        assert law.pgf(t) == pytest.approx(separable_powerlaw_degree_pgf(c, b, t), abs=1e-12)


def test_realized_degree_pgf_vs_monte_carlo():
    spec = bern(Poisson(30), PowerLaw(1.0))
    law = degree_distribution(spec)
    degs = np.concatenate([generate(spec, s).out_degrees() for s in range(1500)])
    hist = np.bincount(degs.astype(int), minlength=60)[:60] / len(degs)
    probs = law.coefficients(59).probs
    assert 0.5 * np.abs(hist - probs).sum() < 0.03


@given(st.floats(1.0, 40.0), st.floats(0.01, 0.99))
@settings(max_examples=25, deadline=None)
def test_in_out_symmetry_undirected(c, p):
    spec = bern(Poisson(c), Constant(p))
    out = degree_distribution(spec, "out")
    inn = degree_distribution(spec, "in")
    assert out.pgf(0.4) == pytest.approx(inn.pgf(0.4))


def test_digraphon_in_out_symmetry_and_asymmetry():
    t = constant_digraphon(0.1, 0.2, 0.0)
    spec = ModelSpec(Poisson(12), LEB, t)
    out = degree_stats(spec, 0.3, "out")
    inn = degree_stats(spec, 0.3, "in")
    assert out.mean == pytest.approx(inn.mean)
    assert out.mean == pytest.approx(12 * 0.3)


def test_edge_report_er():
    rep = edge_report(bern(Dirac(10), Constant(0.3)))
    assert rep.normalized_edge_count == pytest.approx(45 * 0.3)
    assert rep.mean_edge_count == pytest.approx(90 * 0.3)
    assert rep.self_edge_count == 0


def test_edge_report_exponential_external_term():
    kappa, b = NegativeBinomial(4.0, 0.6), 2.0
    rep = edge_report(bern(kappa, Exponential(b)))
    c, d2 = kappa.mean, kappa.var
    assert rep.external_edge_count == pytest.approx((c**2 + d2 - c) * ((1 - np.exp(-b)) / b) ** 2, rel=1e-12)


def test_edge_report_zero_weight():
    spec = bern(Poisson(10), Constant(0.4), weight=WeightFunction("zero"))
    rep = edge_report(spec)
    assert rep.mean_edge_count == 0 and rep.mean_edge_weight == 0


def test_weighted_terms_binomial():
    spec = ModelSpec(Poisson(8), LEB, BinomialTransform(3, Constant(0.25)))
    s, e, _ = mean_edge_terms(spec, weighted=True)
    assert e == pytest.approx(64 * 0.75)
    s, e, _ = mean_edge_terms(spec)
    assert e == pytest.approx(64 * (1 - 0.75**3))


@pytest.mark.parametrize("c,p", [(0.5, 1.0), (2.0, 0.4), (2.0, 0.6), (5.0, 0.1), (5.0, 0.3), (1.0, 0.9)])
def test_gc_poisson_constant(c, p):
    gc = giant_component(bern(Poisson(c), Constant(p)))
    assert gc.verdict == (c * p > 1)
    assert gc.margin == pytest.approx(c * p * (c * p - 1))


@pytest.mark.parametrize("n,p", [(2, 1.0), (3, 0.4), (3, 0.6), (6, 0.19), (6, 0.21)])
def test_gc_dirac_constant(n, p):
    gc = giant_component(bern(Dirac(n), Constant(p)))
    assert gc.verdict == (n >= 3 and p > 1 / (n - 1))


def test_gc_thresholds_located_precisely():
    for c in (2.0, 5.0, 10.0):
        root = gc_threshold(lambda p: giant_component(bern(Poisson(c), Constant(p))).margin, 1e-6, 1.0)
        assert root == pytest.approx(1 / c, abs=1e-9)
    for n in (3, 5, 11):
        root = gc_threshold(lambda p: giant_component(bern(Dirac(n), Constant(p))).margin, 1e-6, 1.0)
        assert root == pytest.approx(1 / (n - 1), abs=1e-9)


def test_gc_zero_kernel_and_directed():
    gc = giant_component(bern(Poisson(5), Constant(0.0)))
    assert gc.margin == 0 and not gc.verdict
    with pytest.raises(ValidationError):
        giant_component(ModelSpec(Poisson(5), LEB, constant_digraphon(0.1, 0.1)))


def test_active_vertices_er_poisson():
    c, p = 3.0, 0.5
    assert mean_active_vertices(bern(Poisson(c), Constant(p))) == pytest.approx(c * (1 - np.exp(-c * p)))
    assert mean_active_vertices(bern(Poisson(c), Constant(0.0))) == 0.0


def test_active_vertices_dirac_forms():
    # a realized vertex sees n - 1 others; an external point sees all n
    n, p = 10, 0.3
    spec = bern(Dirac(n), Constant(p))
    assert mean_active_vertices(spec) == pytest.approx(n * (1 - (1 - p) ** (n - 1)))
    assert mean_active_vertices(spec, realized=False) == pytest.approx(n * (1 - (1 - p) ** n))


def test_active_vertices_exponential_ei_form():
    c, b = 6.0, 1.5
    assert mean_active_vertices(bern(Poisson(c), Exponential(b))) == pytest.approx(
        exponential_active_vertices(c, b), rel=1e-10
    )


def test_active_vertices_mc():
    spec = bern(Binomial(20, 0.5), PowerLaw(2.0))
    vals = np.array([generate(spec, s).active_vertices() for s in range(5000)])
    se = vals.std(ddof=1) / np.sqrt(len(vals))
    assert abs(vals.mean() - mean_active_vertices(spec)) < 4 * se


def test_triangle_examples():
    assert triangle_mean(bern(Poisson(10), Constant(0.0)), 0.5) == 0.0
    kappa, p = Binomial(12, 0.5), 0.4
    c, d2 = kappa.mean, kappa.var
    assert triangle_mean(bern(kappa, Constant(p)), 0.5) == pytest.approx((c**2 + d2 - c) * p**3, rel=1e-10)


def test_triangle_mc():
    from measuregraph.verification import verify

    spec = spec_from_flags("poisson:12", "leb", "bernoulli:powerlaw:1")
    row = verify(spec, reps=4000, seed=5, quantities=("triangle",), z=0.3)[0]
    assert abs(row.z) < 4
