"""Independent verification machinery.

Random operators
    Every draw comes from a Philox4x64-10 counter-based stream (Random123)
    keyed by ``seed + (kind_index << 64)`` with counter 0.  Raw 64-bit words
    become uniforms ``(x >> 11) * 2**-53``; a complex Gaussian entry uses one
    pair of words via Box-Muller::

        u1 = ((x0 >> 11) + 1) * 2**-53        (in (0, 1])
        u2 = (x1 >> 11) * 2**-53
        z  = sqrt(-log u1) * exp(2j * pi * u2)   (E|z|^2 = 1)

    so any implementation of Philox reproduces the same operators.

Dual-norm search
    Brute-force lower bound for ``sup_{||b||_q <= 1} |tau(a b^*)|`` that never
    looks at the closed-form maximizer.  Each candidate ``b`` is scored as
    ``|tau(a b^*)| / ||b||_q``.  Candidates come in chunks of ``CHUNK``: the
    first chunk is random Ginibre directions, and each later chunk spends up
    to half its candidates on forward differences along random orthonormal
    directions around the running best.  The rest go to a log-spaced line
    search along an L-BFGS ascent direction (memory ``LBFGS_MEMORY``).  The
    candidate list of a chunk does not depend on the budget, so a larger
    budget can only improve the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from . import tracealg as ta
from .errors import BadExponent, NotPositive, UnknownKind, ZeroBudget
from .tracealg import BlockOperator, TraceAlgebra

KINDS = ("ginibre", "positive", "unitary", "hermitian", "equality_pair")
CHUNK = 200
LBFGS_MEMORY = 20
_TWO53 = 2.0**-53


class PhiloxStream:
    """Portable Gaussian/uniform stream on top of Philox4x64-10."""

    def __init__(self, seed: int, stream: int = 0):
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self._bits = np.random.Philox(key=int(seed) + (int(stream) << 64))

    def raw(self, n: int) -> np.ndarray:
        return self._bits.random_raw(n)

    def uniform(self, n: int) -> np.ndarray:
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) * _TWO53

    def complex_normal(self, shape) -> np.ndarray:
        n = int(np.prod(shape))
        x = self.raw(2 * n) >> np.uint64(11)
        u1 = (x[0::2].astype(np.float64) + 1.0) * _TWO53
        u2 = x[1::2].astype(np.float64) * _TWO53
        z = np.sqrt(-np.log(u1)) * np.exp(2j * np.pi * u2)
        return z.reshape(shape)

    def normal(self, shape) -> np.ndarray:
        """Real standard normals (real and imaginary parts of complex draws)."""
        n = int(np.prod(shape))
        z = self.complex_normal((n + 1) // 2) * math.sqrt(2.0)
        return np.concatenate([z.real, z.imag])[:n].reshape(shape)


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int
    kind: str = "ginibre"
    scale: float = 1.0
    p: float = 2.0  # exponent of the equality condition, equality_pair only

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnknownKind(f"unknown generator kind {self.kind!r}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def stream(self) -> PhiloxStream:
        return PhiloxStream(self.seed, KINDS.index(self.kind))


def _ginibre(rng: PhiloxStream, d: int) -> np.ndarray:
    return rng.complex_normal((d, d)) / math.sqrt(d)


def _haar_unitary(rng: PhiloxStream, d: int) -> np.ndarray:
    g = rng.complex_normal((d, d))
    q = np.zeros_like(g)
    for j in range(d):
        v = g[:, j].copy()
        for _ in range(2):
            v -= q[:, :j] @ (q[:, :j].conj().T @ v)
        q[:, j] = v / np.linalg.norm(v)
    return q


def random_pair(alg: TraceAlgebra, spec: GeneratorSpec) -> tuple[BlockOperator, BlockOperator]:
    """Pair ``(a, b)`` with ``|b|^q`` proportional to ``|a|^p``.

    Built from explicit singular value decompositions: per block
    ``a = U diag(sigma) V^*`` and ``b = c W diag(sigma^{p-1}) V^*`` with
    independent Haar unitaries ``U, V, W``, so ``b`` has a random polar part
    and the moduli never pass through the package's own kernels.  Roughly a
    quarter of the blocks of size >= 2 get a zero singular value.
    """
    if spec.kind != "equality_pair":
        raise UnknownKind("random_pair needs kind='equality_pair'")
    if not spec.p > 1:
        raise BadExponent("equality pairs need p > 1")
    rng = spec.stream()
    c = math.exp(rng.normal(1)[0])
    a_blocks, b_blocks = [], []
    for d in alg.block_dims:
        u, v, w = (_haar_unitary(rng, d) for _ in range(3))
        sigma = spec.scale * np.exp(0.5 * rng.normal(d))
        if d >= 2 and rng.uniform(1)[0] < 0.25:
            sigma[-1] = 0.0
        a_blocks.append((u * sigma) @ v.conj().T)
        b_blocks.append(c * (w * sigma ** (spec.p - 1.0)) @ v.conj().T)
    return BlockOperator(a_blocks), BlockOperator(b_blocks)


def random_operator(alg: TraceAlgebra, spec: GeneratorSpec) -> BlockOperator:
    """Deterministic random element of ``alg``.

    ``unitary`` ignores ``scale``.  ``equality_pair`` returns the ``a`` half
    of :func:`random_pair`; :func:`companion_operator` returns the ``b`` half.
    """
    if spec.kind == "equality_pair":
        return random_pair(alg, spec)[0]
    rng = spec.stream()
    blocks = []
    for d in alg.block_dims:
        if spec.kind == "ginibre":
            blocks.append(spec.scale * _ginibre(rng, d))
        elif spec.kind == "positive":
            g = _ginibre(rng, d)
            blocks.append(spec.scale * nk.hermitian_part(g.conj().T @ g))
        elif spec.kind == "unitary":
            blocks.append(_haar_unitary(rng, d))
        else:  # hermitian
            g = spec.scale * _ginibre(rng, d)
            blocks.append((g + g.conj().T) / 2)
    return BlockOperator(blocks)


def companion_operator(alg: TraceAlgebra, spec: GeneratorSpec) -> BlockOperator:
    return random_pair(alg, spec)[1]


def random_algebra(
    seed: int, max_dim: int = 8, max_blocks: int = 3, weight_range: tuple[float, float] = (0.1, 10.0)
) -> TraceAlgebra:
    """Algebra with uniform block count and sizes, log-uniform weights."""
    rng = PhiloxStream(seed, len(KINDS))
    k = 1 + int(rng.uniform(1)[0] * max_blocks)
    dims = tuple(1 + int(x * max_dim) for x in rng.uniform(k))
    lo, hi = (math.log(w) for w in weight_range)
    weights = tuple(math.exp(lo + (hi - lo) * x) for x in rng.uniform(k))
    return TraceAlgebra(dims, weights)


# -- dual-norm search -------------------------------------------------------


class _Objective:
    """Batched ``|tau(a b^*)| / ||b||_q`` over flattened candidates."""

    def __init__(self, alg: TraceAlgebra, a: BlockOperator, q: float):
        self.dims = alg.block_dims
        self.weights = np.asarray(alg.weights)
        self.q = q
        self.a_flat = np.concatenate(
            [w * np.asarray(blk).ravel() for w, blk in zip(alg.weights, a.blocks)]
        )
        self.size = int(self.a_flat.size)

    def qnorm(self, x: np.ndarray) -> np.ndarray:
        total = np.zeros(x.shape[0])
        i = 0
        for w, d in zip(self.weights, self.dims):
            blk = x[:, i : i + d * d].reshape(-1, d, d)
            i += d * d
            lam = np.linalg.eigvalsh(np.conj(np.swapaxes(blk, 1, 2)) @ blk)
            total += w * np.sum(np.maximum(lam, 0.0) ** (self.q / 2), axis=1)
        return total ** (1.0 / self.q)

    def __call__(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        pairing = x.conj() @ self.a_flat  # tau(a b^*)
        norms = self.qnorm(x)
        with np.errstate(invalid="ignore", divide="ignore"):
            values = np.where(norms > 0, np.abs(pairing) / norms, 0.0)
        return values, pairing, norms


def _lbfgs_direction(grad: np.ndarray, memory: list) -> np.ndarray:
    # two-loop recursion for ascent on a real inner product space
    q = grad.copy()
    alphas = []
    for s, y in reversed(memory):
        rho = 1.0 / np.vdot(y, s).real
        alpha = rho * np.vdot(s, q).real
        q -= alpha * y
        alphas.append((rho, alpha))
    if memory:
        s, y = memory[-1]
        q *= np.vdot(s, y).real / np.vdot(y, y).real
    for (s, y), (rho, alpha) in zip(memory, reversed(alphas)):
        beta = rho * np.vdot(y, q).real
        q += (alpha - beta) * s
    return q


def _search_chunks(alg: TraceAlgebra, a: BlockOperator, p: float, budget: int, seed: int):
    """Yield the value array of every evaluated chunk, in order."""
    p = float(p)
    if not (p > 1 and math.isfinite(p)):
        raise BadExponent(f"p must be a finite number > 1, got {p}")
    if budget < 1:
        raise ZeroBudget("budget must be a positive integer")
    ta.check_conforms(alg, a)
    f = _Objective(alg, a, ta.conjugate_exponent(p))
    dim = f.size
    rng = PhiloxStream(seed, len(KINDS) + 1)
    x = None  # current iterate, kept unnormalized so curvature pairs stay consistent
    fx = -1.0
    prev = None  # (x, grad) of the previous step
    memory: list = []
    done = 0
    while done < budget:
        m = min(CHUNK, budget - done)
        if x is None:
            cand = rng.complex_normal((CHUNK, dim))[:m]
            values, pairing, _ = f(cand)
        else:
            nx = np.linalg.norm(x)
            h = min(2 * dim, CHUNK // 2)
            eps = 1e-7 * nx
            basis, _ = np.linalg.qr(rng.normal((2 * dim, h)))
            dirs = (basis[:dim] + 1j * basis[dim:]).T
            cand = (x + eps * dirs)[:m]
            values, pairing, _ = f(cand)
            if m > h:
                grad = ((values[:h] - fx) / eps) @ dirs
                if prev is not None and h == 2 * dim:
                    s_k, y_k = x - prev[0], -(grad - prev[1])
                    if np.vdot(s_k, y_k).real > 1e-12 * np.linalg.norm(s_k) * np.linalg.norm(y_k):
                        memory = (memory + [(s_k, y_k)])[-LBFGS_MEMORY:]
                prev = (x, grad)
                step = _lbfgs_direction(grad, memory) if h == 2 * dim else grad
                if np.vdot(step, grad).real <= 0:
                    step, memory = grad, []
                sn = np.linalg.norm(step)
                if sn > 0 and np.isfinite(sn):
                    alphas = nx * np.logspace(-8, 0.5, CHUNK - h)
                    line = x + alphas[:, None] * (step / sn)
                else:
                    line = rng.complex_normal((CHUNK - h, dim))
                line = line[: m - h]
                lv, lp, _ = f(line)
                cand = np.concatenate([cand, line])
                values = np.concatenate([values, lv])
                pairing = np.concatenate([pairing, lp])
        done += m
        i = int(np.argmax(values))
        if x is None or values[i] > fx:
            fx = values[i]
            x = cand[i]
            if x is not None and prev is None and pairing[i] != 0:
                # multiplying b by the phase makes tau(a b^*) real and nonnegative
                x = x * (pairing[i] / abs(pairing[i]))
        yield values


def dual_norm_search(
    alg: TraceAlgebra, a: BlockOperator, p: float, budget: int = 20000, seed: int = 0
) -> float:
    """Best ``|tau(a b^*)|`` over ``budget`` candidates with ``||b||_q = 1``."""
    best = 0.0
    for values in _search_chunks(alg, a, p, budget, seed):
        best = max(best, float(np.max(values)))
    return best


def search_values(alg: TraceAlgebra, a: BlockOperator, p: float, budget: int, seed: int = 0) -> np.ndarray:
    """Every candidate value evaluated by :func:`dual_norm_search`."""
    return np.concatenate(list(_search_chunks(alg, a, p, budget, seed)))


def integer_power_check(m, k: int) -> float:
    """``||power(m, k) - m^k||_F`` with ``m^0`` read as the support projection."""
    m = nk.as_matrix(m)
    if k < 0 or int(k) != k:
        raise ValueError("k must be a nonnegative integer")
    lam = np.linalg.eigvalsh(nk.hermitian_part(m))
    if not nk.is_hermitian(m) or (lam.size and lam[0] < -nk.PSD_TOL * max(1.0, np.max(np.abs(lam)))):
        raise NotPositive("integer_power_check needs a positive semidefinite matrix")
    if k == 0:
        expected = nk.range_projection(m)
    else:
        expected = m.copy()
        for _ in range(int(k) - 1):
            expected = expected @ m
    return float(np.linalg.norm(nk.power(m, k) - expected))
