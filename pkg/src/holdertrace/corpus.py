"""Seeded case generators for the property corpus.

Each generator yields plain tuples so both the test-suite and the
``selftest`` command can drive the same cases.  Seeds are derived as
``base + i`` so any single case can be regenerated in isolation.
"""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from . import oracle as orc
from .oracle import GeneratorSpec, PhiloxStream
from .tracealg import BlockOperator, TraceAlgebra

# distinct offsets keep the corpora from sharing seeds
HOLDER_BASE = 1_000_000
EQUALITY_BASE = 2_000_000
CS_BASE = 3_000_000
POSITIVITY_BASE = 4_000_000
PONE_BASE = 5_000_000
WITNESS_BASE = 6_000_000


def holder_cases(count: int, max_dim: int = 8, max_blocks: int = 3, base: int = HOLDER_BASE):
    """Random ``(alg, a, b, p)`` with ``p`` log-uniform in [1.05, 8]."""
    lo, hi = math.log(1.05), math.log(8.0)
    for i in range(count):
        seed = base + i
        alg = orc.random_algebra(seed, max_dim, max_blocks)
        a = orc.random_operator(alg, GeneratorSpec(seed, "ginibre"))
        b = orc.random_operator(alg, GeneratorSpec(seed + 2**32, "ginibre"))
        p = math.exp(lo + (hi - lo) * PhiloxStream(seed, 99).uniform(1)[0])
        yield alg, a, b, p


def _with_block_of_two(alg: TraceAlgebra) -> TraceAlgebra:
    if max(alg.block_dims) >= 2:
        return alg
    return TraceAlgebra(alg.block_dims + (2,), alg.weights + (1.0,))


def equality_cases(count: int, max_dim: int = 8, max_blocks: int = 3, base: int = EQUALITY_BASE):
    """``(alg, a, b, p)`` satisfying the equality condition, random polar parts.

    Scalar algebras are skipped over (every nonzero pair is extremal there) by
    appending a 2x2 block when all blocks are 1x1.
    """
    lo, hi = math.log(1.05), math.log(8.0)
    for i in range(count):
        seed = base + i
        alg = _with_block_of_two(orc.random_algebra(seed, max_dim, max_blocks))
        p = math.exp(lo + (hi - lo) * PhiloxStream(seed, 99).uniform(1)[0])
        a, b = orc.random_pair(alg, GeneratorSpec(seed, "equality_pair", p=p))
        yield alg, a, b, p


def _hermitian_direction(rng: PhiloxStream, alg: TraceAlgebra) -> BlockOperator:
    blocks = []
    for d in alg.block_dims:
        g = rng.complex_normal((d, d))
        blocks.append((g + g.conj().T) / 2)
    # one global scale, so 1x1 blocks are not all moved by the same factor
    top = max(np.linalg.norm(h, 2) for h in blocks)
    return BlockOperator(h / top for h in blocks)


def perturb_modulus(alg: TraceAlgebra, a: BlockOperator, eps: float, seed: int) -> BlockOperator:
    """``a (1 + eps H)`` for a random Hermitian ``H`` of unit operator norm.

    ``|a (1 + eps H)|^2 = (1 + eps H)|a|^2(1 + eps H)`` so the modulus moves
    at first order in ``eps``.
    """
    h = _hermitian_direction(PhiloxStream(seed, 98), alg)
    return a @ (alg.identity() + eps * h)


def cauchy_schwarz_proportional(count: int, max_dim: int = 8, base: int = CS_BASE):
    """``(alg, x, y, lam)`` with ``x = lam y``."""
    for i in range(count):
        seed = base + i
        alg = orc.random_algebra(seed, max_dim)
        y = orc.random_operator(alg, GeneratorSpec(seed, "ginibre"))
        lam = float(np.exp(PhiloxStream(seed, 99).normal(1)[0]))
        yield alg, lam * y, y, lam


def cauchy_schwarz_generic(count: int, max_dim: int = 8, base: int = CS_BASE + 500_000):
    for i in range(count):
        seed = base + i
        alg = orc.random_algebra(seed, max_dim)
        x = orc.random_operator(alg, GeneratorSpec(seed, "ginibre"))
        y = orc.random_operator(alg, GeneratorSpec(seed + 2**32, "ginibre"))
        yield alg, x, y


def positive_cases(count: int, max_dim: int = 8, base: int = POSITIVITY_BASE):
    for i in range(count):
        seed = base + i
        alg = orc.random_algebra(seed, max_dim)
        yield alg, orc.random_operator(alg, GeneratorSpec(seed, "positive"))


def nonnormal_real_trace_cases(count: int, max_dim: int = 8, base: int = POSITIVITY_BASE + 500_000):
    """Ginibre elements shifted by an imaginary scalar so that ``tau(a)`` is real.

    Blocks of size 1 are normal, so every algebra here has a block of size >= 2.
    """
    for i in range(count):
        seed = base + i
        alg = orc.random_algebra(seed, max_dim)
        if max(alg.block_dims) < 2:
            alg = TraceAlgebra(alg.block_dims[:-1] + (2,), alg.weights)
        g = orc.random_operator(alg, GeneratorSpec(seed, "ginibre"))
        tau_g = sum(w * np.trace(blk) for w, blk in zip(alg.weights, g.blocks))
        tau_one = sum(w * d for w, d in zip(alg.weights, alg.block_dims))
        yield alg, g - (1j * tau_g.imag / tau_one) * alg.identity()


def _b_with_spectrum(rng: PhiloxStream, alg: TraceAlgebra, spectra: list[np.ndarray]):
    """``b = W diag(beta) V^*`` per block; returns ``(b, [V])``."""
    blocks, frames = [], []
    for d, beta in zip(alg.block_dims, spectra):
        w, v = orc._haar_unitary(rng, d), orc._haar_unitary(rng, d)
        blocks.append((w * beta) @ v.conj().T)
        frames.append(v)
    return BlockOperator(blocks), frames


def p_one_attaining_cases(count: int, max_dim: int = 8, base: int = PONE_BASE):
    """Pairs where the support of ``|a|`` sits inside the top eigenspace of ``|b|``.

    ``|b| = V diag(beta) V^*`` with the global maximum ``c`` of multiplicity
    ``t_k >= 1`` in every block; ``a_k = G_k P_k`` with ``P_k`` the projection
    onto that eigenspace, so ``p_a |b| = c p_a = |b| p_a``.
    """
    for i in range(count):
        seed = base + i
        alg = orc.random_algebra(seed, max_dim)
        rng = PhiloxStream(seed, 97)
        c = 1.0 + 2.0 * rng.uniform(1)[0]
        spectra, tops = [], []
        for d in alg.block_dims:
            t = 1 + int(rng.uniform(1)[0] * d)
            beta = np.concatenate([np.full(t, c), c * (0.1 + 0.8 * rng.uniform(d - t))])
            spectra.append(beta)
            tops.append(t)
        b, frames = _b_with_spectrum(rng, alg, spectra)
        a_blocks = []
        for d, t, v in zip(alg.block_dims, tops, frames):
            top = v[:, :t]
            a_blocks.append(rng.complex_normal((d, d)) @ top @ top.conj().T)
        yield alg, BlockOperator(a_blocks), b


def p_one_generic_cases(count: int, max_dim: int = 8, base: int = PONE_BASE + 500_000):
    """Pairs whose operator norm of ``b`` is attained off the support of ``a``.

    The top singular direction ``v_1`` of ``b`` (simple, in a block of size
    >= 2) is annihilated by ``a``; every other direction is generic.
    """
    for i in range(count):
        seed = base + i
        alg = _with_block_of_two(orc.random_algebra(seed, max_dim))
        rng = PhiloxStream(seed, 97)
        c = 1.0 + 2.0 * rng.uniform(1)[0]
        wide = [k for k, d in enumerate(alg.block_dims) if d >= 2]
        top_block = wide[int(rng.uniform(1)[0] * len(wide))]
        spectra = []
        for k, d in enumerate(alg.block_dims):
            beta = c * (0.1 + 0.8 * rng.uniform(d))
            if k == top_block:
                beta[0] = c
            spectra.append(beta)
        b, frames = _b_with_spectrum(rng, alg, spectra)
        a_blocks = []
        for k, (d, v) in enumerate(zip(alg.block_dims, frames)):
            g = rng.complex_normal((d, d))
            if k == top_block:
                v1 = v[:, :1]
                g = g @ (np.eye(d) - v1 @ v1.conj().T)
            a_blocks.append(g)
        yield alg, BlockOperator(a_blocks), b


def witness_cases(count: int, max_dim: int = 4, max_blocks: int = 3, base: int = WITNESS_BASE):
    """Random ``(alg, a)`` for the dual witness checks."""
    for i in range(count):
        seed = base + i
        alg = orc.random_algebra(seed, max_dim, max_blocks)
        yield alg, orc.random_operator(alg, GeneratorSpec(seed, "ginibre"))


def random_hermitian(seed: int, n: int) -> np.ndarray:
    g = PhiloxStream(seed, 96).complex_normal((n, n))
    return (g + g.conj().T) / 2


def random_positive(seed: int, n: int) -> np.ndarray:
    g = PhiloxStream(seed, 95).complex_normal((n, n)) / math.sqrt(n)
    return g.conj().T @ g


def take(gen: Iterator, n: int) -> list:
    return [x for _, x in zip(range(n), gen)]
