import math

import numpy as np
import pytest

from holdertrace import oracle as orc
from holdertrace import tracealg as ta
from holdertrace.corpus import random_positive
from holdertrace.errors import BadExponent, NotPositive, UnknownKind, ZeroBudget
from holdertrace.oracle import GeneratorSpec, PhiloxStream
from holdertrace.tracealg import TraceAlgebra

ALG = TraceAlgebra((3, 2, 1), (0.5, 2.0, 7.0))


@pytest.mark.parametrize("kind", ["ginibre", "positive", "unitary", "hermitian", "equality_pair"])
def test_determinism(kind):
    x = orc.random_operator(ALG, GeneratorSpec(1, kind))
    y = orc.random_operator(ALG, GeneratorSpec(1, kind))
    assert all(u.tobytes() == v.tobytes() for u, v in zip(x.blocks, y.blocks))
    z = orc.random_operator(ALG, GeneratorSpec(2, kind))
    assert any(u.tobytes() != v.tobytes() for u, v in zip(x.blocks, z.blocks))


def test_philox_stream_is_reproducible_and_keyed():
    a, b = PhiloxStream(5).raw(8), PhiloxStream(5).raw(8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, PhiloxStream(5, stream=1).raw(8))
    u = PhiloxStream(5).uniform(10_000)
    assert 0 <= u.min() and u.max() < 1


def test_positive_kind():
    x = orc.random_operator(ALG, GeneratorSpec(1, "positive"))
    for blk in x.blocks:
        assert np.array_equal(blk, blk.conj().T)
        assert np.linalg.eigvalsh(blk)[0] >= -1e-12


def test_unitary_kind():
    u = orc.random_operator(TraceAlgebra.matrix(8), GeneratorSpec(2, "unitary"))
    assert np.linalg.norm(u.blocks[0].conj().T @ u.blocks[0] - np.eye(8)) <= 1e-10


def test_hermitian_kind_is_exact():
    h = orc.random_operator(ALG, GeneratorSpec(3, "hermitian"))
    assert all(np.max(np.abs(blk - blk.conj().T)) == 0 for blk in h.blocks)


def test_scale():
    x = orc.random_operator(ALG, GeneratorSpec(4, "ginibre", scale=3.0))
    y = orc.random_operator(ALG, GeneratorSpec(4, "ginibre"))
    for u, v in zip(x.blocks, y.blocks):
        np.testing.assert_allclose(u, 3 * v)


def test_unknown_kind():
    with pytest.raises(UnknownKind):
        GeneratorSpec(1, "wishart")


def test_equality_pair_moduli():
    spec = GeneratorSpec(5, "equality_pair", p=3.0)
    a, b = orc.random_pair(ALG, spec)
    assert orc.companion_operator(ALG, spec).blocks[0].tobytes() == b.blocks[0].tobytes()
    q = 1.5
    # independent route: numpy eigh for the densities
    def density(x, r):
        out = []
        for blk in x.blocks:
            lam, v = np.linalg.eigh(blk.conj().T @ blk)
            out.append((v * np.maximum(lam, 0) ** (r / 2)) @ v.conj().T)
        return out
    da, db = density(a, 3.0), density(b, q)
    ta_ = sum(w * np.trace(d).real for w, d in zip(ALG.weights, da))
    tb_ = sum(w * np.trace(d).real for w, d in zip(ALG.weights, db))
    for x, y in zip(da, db):
        np.testing.assert_allclose(x / ta_, y / tb_, atol=1e-10)


def test_random_algebra_ranges():
    for seed in range(50):
        alg = orc.random_algebra(seed, 4, 3)
        assert 1 <= alg.num_blocks <= 3
        assert all(1 <= d <= 4 for d in alg.block_dims)
        assert all(0.1 <= w <= 10 for w in alg.weights)


# -- dual-norm search ----------------------------------------------------------


def test_search_diagonal():
    m2 = TraceAlgebra.matrix(2)
    best = orc.dual_norm_search(m2, m2.diag([2, 1]), 3, budget=20000)
    assert abs(best - 9 ** (1 / 3)) <= 1e-2
    assert best <= 9 ** (1 / 3) + 1e-9


def test_search_zero():
    assert orc.dual_norm_search(ALG, ALG.zeros(), 2, budget=100) == 0


def test_search_unitary():
    m2 = TraceAlgebra.matrix(2)
    u = orc.random_operator(m2, GeneratorSpec(6, "unitary"))
    assert abs(orc.dual_norm_search(m2, u, 2, budget=20000) - math.sqrt(2)) <= 1e-2


def test_search_monotone_in_budget():
    alg = orc.random_algebra(8, 4)
    a = orc.random_operator(alg, GeneratorSpec(8))
    results = [orc.dual_norm_search(alg, a, 1.5, budget=b, seed=3) for b in (1, 50, 200, 201, 1000, 3000)]
    assert all(y >= x for x, y in zip(results, results[1:]))


@pytest.mark.parametrize("p", [1.2, 2, 5])
def test_every_candidate_respects_holder(p):
    alg = orc.random_algebra(9, 4)
    a = orc.random_operator(alg, GeneratorSpec(9))
    values = orc.search_values(alg, a, p, budget=2000)
    assert values.size == 2000
    assert np.max(values) <= ta.pnorm(alg, a, p) + 1e-9


def test_search_errors():
    m2 = TraceAlgebra.matrix(2)
    with pytest.raises(ZeroBudget):
        orc.dual_norm_search(m2, m2.identity(), 2, budget=0)
    with pytest.raises(BadExponent):
        orc.dual_norm_search(m2, m2.identity(), 1, budget=10)


# -- integer powers ---------------------------------------------------------------


def test_integer_power_examples():
    assert orc.integer_power_check(np.diag([2.0, 3.0]), 2) == 0
    m = random_positive(5, 6)
    assert orc.integer_power_check(m, 3) <= 1e-9 * (1 + np.linalg.norm(m) ** 3)
    assert orc.integer_power_check(np.diag([0.0, 2.0]), 0) == 0


@pytest.mark.parametrize("k", range(7))
def test_integer_power_sweep(k):
    for seed in range(10):
        n = 1 + seed % 16
        m = random_positive(seed, n)
        assert orc.integer_power_check(m, k) <= 1e-9 * (1 + np.linalg.norm(m) ** k)


def test_integer_power_rejects_indefinite():
    with pytest.raises(NotPositive):
        orc.integer_power_check(np.diag([1.0, -1.0]), 2)
