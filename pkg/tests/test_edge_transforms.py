import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from measuregraph.distributions import UnitInterval
from measuregraph.edge_transforms import (
    BernoulliTransform,
    BinomialTransform,
    Block,
    Constant,
    DotProduct,
    Exponential,
    Layered,
    LegendreExpansion,
    PoissonTransform,
    PowerLaw,
    Restricted,
    WeightFunction,
    constant_digraphon,
    digraphon_mass,
    eval_kernel,
    kernel_from_dict,
    legendre_basis,
    parse_kernel,
    parse_transform,
    sample_edge,
    transform_from_dict,
    transform_mean,
    validate_range,
)
from measuregraph.errors import ValidationError
from measuregraph.distributions import gauss_legendre


def test_eval_kernel_examples():
    assert eval_kernel(Constant(0.3), 0.2, 0.7) == pytest.approx(0.3)
    assert eval_kernel(PowerLaw(1.0, zero_diagonal=False), 0.0, 0.0) == pytest.approx(1.0)
    blk = Block((0.5,), ((0.1, 0.2), (0.2, 0.4)))
    assert eval_kernel(blk, 0.25, 0.75) == pytest.approx(0.2)
    assert eval_kernel(blk, 0.75, 0.9) == pytest.approx(0.4)


def test_zero_diagonal_mask():
    assert eval_kernel(Constant(0.3), 0.4, 0.4) == 0.0
    assert eval_kernel(Constant(0.3, zero_diagonal=False), 0.4, 0.4) == pytest.approx(0.3)


def test_dot_product_kernel():
    k = DotProduct(1.0, 2)
    x = np.array([0.5, 1.0])
    y = np.array([1.0, 0.5])
    assert eval_kernel(k, x, y) == pytest.approx(0.5)


def test_restricted_is_strictly_upper():
    r = Restricted(Constant(1.0))
    assert eval_kernel(r, 0.2, 0.3) == 1.0
    assert eval_kernel(r, 0.3, 0.2) == 0.0
    assert eval_kernel(r, 0.3, 0.3) == 0.0


def test_layered_kernel():
    k = Layered((0.5, 0.25))
    assert eval_kernel(k, 1, 2) == 0.5
    assert eval_kernel(k, 2, 3) == 0.25
    assert eval_kernel(k, 2, 1) == 0.0
    assert eval_kernel(k, 3, 4) == 0.0


def test_legendre_basis_orthonormal():
    x, w = gauss_legendre(20)
    phi = legendre_basis(x, 5)
    gram = phi.T @ (w[:, None] * phi)
    assert np.allclose(gram, np.eye(5), atol=1e-12)


def test_legendre_expansion_separable():
    k = LegendreExpansion((0.5, 0.1), separable=True, zero_diagonal=False)
    x = np.linspace(0, 1, 7)
    g = 0.5 + 0.1 * np.sqrt(3) * (2 * x - 1)
    assert np.allclose(k(x[:, None], x[None, :]), np.outer(g, g))


def test_block_validation():
    with pytest.raises(ValidationError):
        Block((0.5,), ((0.1, 0.2, 0.3),))
    with pytest.raises(ValidationError):
        Block((0.7, 0.3), np.full((3, 3), 0.1))


def test_validate_range_rejects_over_one():
    validate_range(Constant(0.3))
    with pytest.raises(ValidationError):
        validate_range(Constant(1.5))
    with pytest.raises(ValidationError):
        BernoulliTransform(Constant(-0.1)).validate(UnitInterval())


def test_sample_edge_examples():
    assert all(sample_edge(BernoulliTransform(Constant(1.0)), 0.1, 0.2 + i / 1000, seed=i) == 1.0 for i in range(50))
    assert all(sample_edge(PoissonTransform(Constant(0.0)), 0.1, 0.2, seed=i) == 0.0 for i in range(50))


def test_sample_edge_reproducible_and_symmetric_key():
    t = PoissonTransform(Constant(3.0))
    assert sample_edge(t, 0.1, 0.9, 7) == sample_edge(t, 0.1, 0.9, 7)
    assert sample_edge(t, 0.1, 0.9, 7) == sample_edge(t, 0.9, 0.1, 7)


def test_binomial_transform_mc_mean():
    t = BinomialTransform(5, Constant(0.4))
    draws = np.array([sample_edge(t, 0.1, 0.2, s) for s in range(20_000)])
    se = np.sqrt(5 * 0.4 * 0.6 / len(draws))
    assert abs(draws.mean() - 2.0) < 3 * se


def test_transform_mean_examples():
    k = PowerLaw(1.0)
    assert transform_mean(BernoulliTransform(k), 0.2, 0.6) == pytest.approx(k(0.2, 0.6))
    assert transform_mean(BinomialTransform(3, Constant(0.5)), 0.1, 0.3) == pytest.approx(1.5)
    assert transform_mean(PoissonTransform(Constant(2.5)), 0.1, 0.3) == pytest.approx(2.5)


@given(st.floats(0, 1), st.floats(0, 0.5), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=50, deadline=None)
def test_digraphon_total_mass(q11, q01_frac, g, x, y):
    q01 = q01_frac * (1 - q11)
    t = constant_digraphon(q01, q11, g)
    full = {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert digraphon_mass(t, x, y, full) == pytest.approx(1.0)


def test_digraphon_examples():
    t = constant_digraphon(0.1, 0.3, 0.7)
    assert digraphon_mass(t, 0.2, 0.6, {(1, 1)}) == pytest.approx(0.3)
    assert digraphon_mass(t, 0.4, 0.4, {(1, 1)}) == pytest.approx(0.7)
    assert digraphon_mass(t, 0.2, 0.6, {(1, 0), (1, 1)}) == pytest.approx(0.4)
    with pytest.raises(ValidationError):
        constant_digraphon(0.5, 0.3)


def test_weight_functions():
    w = np.array([0.0, 1.0, 3.0])
    assert np.array_equal(WeightFunction("indicator")(w), [0, 1, 1])
    assert np.array_equal(WeightFunction("power", 2)(w), [0, 1, 9])
    assert np.array_equal(WeightFunction("zero")(w), [0, 0, 0])
    with pytest.raises(ValidationError):
        WeightFunction("log")


@pytest.mark.parametrize("text", ["bernoulli:constant:0.3", "poisson:powerlaw:1", "binomial:5:exponential:2",
                                  "bernoulli:dotproduct:1:2", "digraphon:0.1:0.2:0.5"])
def test_parse_transform_round_trip(text):
    t = parse_transform(text)
    again = transform_from_dict(t.to_dict())
    x, y = 0.3, 0.8
    if again.kernel.dim:
        x, y = np.array([0.3, 0.5]), np.array([0.8, 0.1])
    assert np.allclose(again.mean(x, y), t.mean(x, y))


@pytest.mark.parametrize("text", ["", "bernoulli", "bernoulli:spline:1", "binomial:constant:0.3",
                                  "digraphon:0.1", "gamma:constant:0.3"])
def test_parse_transform_errors(text):
    with pytest.raises(ValidationError):
        parse_transform(text)


def test_kernel_dict_round_trip():
    for k in (Constant(0.2), PowerLaw(2.0), Exponential(1.5), Block((0.3,), ((0.1, 0.2), (0.2, 0.3))),
              LegendreExpansion(((0.5, 0.0), (0.0, 0.1)))):
        again = kernel_from_dict(k.to_dict())
        assert again(0.2, 0.9) == pytest.approx(k(0.2, 0.9))
    assert parse_kernel("exponential:2")(0.1, 0.2) == pytest.approx(np.exp(-0.6))
