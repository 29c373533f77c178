import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holdertrace import oracle as orc
from holdertrace import tracealg as ta
from holdertrace.errors import BadExponent, ShapeMismatch
from holdertrace.oracle import GeneratorSpec
from holdertrace.tracealg import BlockOperator, TraceAlgebra

seeds = st.integers(0, 2**40)


def draw(seed, kind="ginibre", max_dim=5):
    alg = orc.random_algebra(seed, max_dim)
    return alg, orc.random_operator(alg, GeneratorSpec(seed, kind))


def test_algebra_validation():
    with pytest.raises(ValueError):
        TraceAlgebra((2,), (0.0,))
    with pytest.raises(ValueError):
        TraceAlgebra((), ())
    with pytest.raises(ValueError):
        TraceAlgebra((0,), (1.0,))


def test_block_operator_is_immutable():
    x = TraceAlgebra.matrix(2).identity()
    with pytest.raises(ValueError):
        x.blocks[0][0, 0] = 5
    with pytest.raises(AttributeError):
        x.blocks = ()


def test_trace_examples():
    alg = TraceAlgebra((1, 1), (2, 3))
    assert ta.trace(alg, alg.diag([1, 1])) == 5
    assert ta.trace(alg, alg.diag([1j, -1j])) == -1j
    assert ta.trace(TraceAlgebra.matrix(2), BlockOperator([[[0, 1], [1, 0]]])) == 0


def test_shape_mismatch():
    alg = TraceAlgebra((2, 1), (1, 1))
    with pytest.raises(ShapeMismatch):
        ta.trace(alg, TraceAlgebra.matrix(3).identity())
    with pytest.raises(ShapeMismatch):
        alg.identity() + TraceAlgebra.matrix(3).identity()


def test_inner_examples():
    m2 = TraceAlgebra.matrix(2)
    assert ta.inner(m2, m2.identity(), m2.identity()) == 2
    # 1*2 + 2*4
    assert ta.inner(m2, m2.diag([1, 2]), m2.diag([2, 4])) == 10
    assert ta.inner(m2, m2.diag([1, 0]), m2.diag([0, 1])) == 0


def test_inner_is_linear_in_first_argument():
    alg, x = draw(1)
    y = orc.random_operator(alg, GeneratorSpec(2))
    c = 0.3 - 1.7j
    assert ta.inner(alg, c * x, y) == pytest.approx(c * ta.inner(alg, x, y))
    assert ta.inner(alg, x, c * y) == pytest.approx(np.conj(c) * ta.inner(alg, x, y))


def test_pnorm_examples():
    m2 = TraceAlgebra.matrix(2)
    assert ta.pnorm(m2, m2.diag([2, 1]), 3) == pytest.approx(9 ** (1 / 3), rel=1e-15)
    alg = TraceAlgebra((1, 1), (2, 3))
    # 2*1 + 3*4 = 14
    assert ta.pnorm(alg, alg.diag([1, 2]), 2) == pytest.approx(math.sqrt(14), rel=1e-15)
    assert ta.pnorm(alg, alg.zeros(), 1.5) == 0


def test_pnorm_rejects_small_p():
    m2 = TraceAlgebra.matrix(2)
    with pytest.raises(BadExponent):
        ta.pnorm(m2, m2.identity(), 0.5)


def test_pnorm_no_overflow_for_huge_p():
    m2 = TraceAlgebra.matrix(2)
    assert ta.pnorm(m2, m2.diag([1e10, 1]), 1e4) == pytest.approx(1e10)


def test_opnorm_examples():
    m2 = TraceAlgebra.matrix(2)
    assert ta.opnorm(TraceAlgebra((2,), (7.0,)), m2.diag([3, 1])) == 3
    assert ta.opnorm(m2, BlockOperator([[[0, 2], [0, 0]]])) == pytest.approx(2)
    alg, u = draw(5, "unitary")
    assert ta.opnorm(alg, u) == pytest.approx(1, abs=1e-12)
    assert ta.pnorm(alg, u, math.inf) == ta.opnorm(alg, u)


def test_conjugate_exponent():
    assert ta.conjugate_exponent(2) == 2
    assert ta.conjugate_exponent(3) == pytest.approx(1.5, rel=1e-15)
    assert ta.conjugate_exponent(1) == math.inf
    assert ta.conjugate_exponent(math.inf) == 1
    with pytest.raises(BadExponent):
        ta.conjugate_exponent(0.9)


@given(p=st.floats(1.0001, 1e6))
def test_conjugate_exponent_round_trip(p):
    q = ta.conjugate_exponent(p)
    assert abs(ta.conjugate_exponent(q) - p) <= 1e-14 * p * max(1.0, p)
    assert abs(1 / p + 1 / q - 1) <= 1e-15


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_faithfulness(seed):
    alg, x = draw(seed)
    assert ta.inner(alg, x, x).real > 0
    assert abs(ta.inner(alg, x, x).imag) <= 1e-14 * ta.inner(alg, x, x).real
    assert ta.inner(alg, alg.zeros(), alg.zeros()) == 0


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_traciality(seed):
    alg, x = draw(seed)
    y = orc.random_operator(alg, GeneratorSpec(seed + 1))
    xy, yx = ta.trace(alg, x @ y), ta.trace(alg, y @ x)
    assert abs(xy - yx) <= 1e-10 * (1 + abs(xy))


@settings(max_examples=15, deadline=None)
@given(seed=seeds)
def test_unitary_invariance(seed):
    alg, x = draw(seed)
    u = orc.random_operator(alg, GeneratorSpec(seed + 1, "unitary"))
    v = orc.random_operator(alg, GeneratorSpec(seed + 2, "unitary"))
    for p in (1, 1.5, 2, 3):
        expected = ta.pnorm(alg, x, p)
        assert ta.pnorm(alg, u @ x @ v, p) == pytest.approx(expected, rel=1e-9)


@settings(max_examples=15, deadline=None)
@given(seed=seeds)
def test_pnorm_tends_to_opnorm(seed):
    alg, x = draw(seed)
    top = ta.opnorm(alg, x)
    assert abs(ta.pnorm(alg, x, 64) - top) <= 0.10 * top
    assert abs(ta.pnorm(alg, x, 1024) - top) <= 0.01 * top


@settings(max_examples=30, deadline=None)
@given(seed=seeds, c=st.complex_numbers(max_magnitude=1e3, allow_nan=False), p=st.floats(1, 10))
def test_pnorm_homogeneous(seed, c, p):
    alg, x = draw(seed)
    assert ta.pnorm(alg, c * x, p) == pytest.approx(abs(c) * ta.pnorm(alg, x, p), rel=1e-12, abs=1e-300)


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_cauchy_schwarz_numeric(seed):
    alg, x = draw(seed)
    y = orc.random_operator(alg, GeneratorSpec(seed + 1))
    assert abs(ta.inner(alg, x, y)) <= ta.pnorm(alg, x, 2) * ta.pnorm(alg, y, 2) + 1e-10


def test_pnorm_matches_weighted_singular_values():
    alg = TraceAlgebra((2, 3), (0.5, 4.0))
    x = orc.random_operator(alg, GeneratorSpec(11))
    # independent route: LAPACK singular values
    s = [np.linalg.svd(b, compute_uv=False) for b in x.blocks]
    expected = (0.5 * np.sum(s[0] ** 2.5) + 4.0 * np.sum(s[1] ** 2.5)) ** (1 / 2.5)
    assert ta.pnorm(alg, x, 2.5) == pytest.approx(expected, rel=1e-13)


def test_support_projection_is_range_of_modulus():
    m2 = TraceAlgebra.matrix(2)
    a = BlockOperator([[[0, 1], [0, 0]]])  # a e2 = e1
    np.testing.assert_allclose(ta.range_projection(a).blocks[0], np.diag([1, 0]), atol=1e-15)
    np.testing.assert_allclose(ta.support_projection(a).blocks[0], np.diag([0, 1]), atol=1e-15)
    np.testing.assert_allclose(ta.power(ta.modulus(a), 0).blocks[0], np.diag([0, 1]), atol=1e-15)
    assert m2.identity().to_dense().shape == (2, 2)
