"""Block-diagonal *-algebras carrying a weighted faithful trace.

An algebra is ``M_{d_1} + ... + M_{d_K}`` with trace
``tau(x) = sum_k w_k Tr(x_k)``, ``w_k > 0``.  Elements are
:class:`BlockOperator` values holding one square complex block per summand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import numkernel as nk
from .errors import BadExponent, ShapeMismatch

INF = math.inf


@dataclass(frozen=True)
class TraceAlgebra:
    block_dims: tuple[int, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        weights = tuple(float(w) for w in self.weights)
        if not dims:
            raise ValueError("an algebra needs at least one block")
        if len(dims) != len(weights):
            raise ValueError("block_dims and weights differ in length")
        if any(d < 1 for d in dims):
            raise ValueError("block dimensions must be positive")
        if any(not (w > 0 and math.isfinite(w)) for w in weights):
            raise ValueError("trace weights must be finite and strictly positive")
        object.__setattr__(self, "block_dims", dims)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def matrix(cls, n: int, weight: float = 1.0) -> "TraceAlgebra":
        """The full matrix algebra M_n with trace ``weight * Tr``."""
        return cls((n,), (weight,))

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    def zeros(self) -> "BlockOperator":
        return BlockOperator([np.zeros((d, d), np.complex128) for d in self.block_dims])

    def identity(self) -> "BlockOperator":
        return BlockOperator([np.eye(d, dtype=np.complex128) for d in self.block_dims])

    def element(self, blocks) -> "BlockOperator":
        x = BlockOperator(blocks)
        check_conforms(self, x)
        return x

    def diag(self, values: Sequence[complex]) -> "BlockOperator":
        """Diagonal element; ``values`` runs over all blocks in order."""
        values = list(values)
        if len(values) != sum(self.block_dims):
            raise ShapeMismatch("wrong number of diagonal entries")
        blocks, i = [], 0
        for d in self.block_dims:
            blocks.append(np.diag(np.asarray(values[i : i + d], dtype=np.complex128)))
            i += d
        return BlockOperator(blocks)


class BlockOperator:
    """Immutable element of a block-diagonal algebra."""

    __slots__ = ("blocks",)

    def __init__(self, blocks: Iterable):
        frozen = []
        for b in blocks:
            arr = np.array(nk.as_matrix(b), dtype=np.complex128, copy=True)
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "blocks", tuple(frozen))

    def __setattr__(self, name, value):
        raise AttributeError("BlockOperator is immutable")

    @property
    def block_dims(self) -> tuple[int, ...]:
        return tuple(b.shape[0] for b in self.blocks)

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "BlockOperator":
        return BlockOperator(fn(b) for b in self.blocks)

    def _zip(self, other: "BlockOperator", fn) -> "BlockOperator":
        if not isinstance(other, BlockOperator):
            return NotImplemented
        if self.block_dims != other.block_dims:
            raise ShapeMismatch(f"block dims {self.block_dims} vs {other.block_dims}")
        return BlockOperator(fn(x, y) for x, y in zip(self.blocks, other.blocks))

    @property
    def H(self) -> "BlockOperator":
        return self.map(nk.adjoint)

    def __add__(self, other):
        return self._zip(other, np.add)

    def __sub__(self, other):
        return self._zip(other, np.subtract)

    def __matmul__(self, other):
        return self._zip(other, np.matmul)

    def __mul__(self, c):
        if isinstance(c, BlockOperator):
            return NotImplemented
        return self.map(lambda b: b * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.map(lambda b: b / c)

    def __neg__(self):
        return self.map(np.negative)

    def is_zero(self) -> bool:
        return all(not np.any(b) for b in self.blocks)

    def to_dense(self) -> np.ndarray:
        n = sum(self.block_dims)
        out = np.zeros((n, n), np.complex128)
        i = 0
        for b in self.blocks:
            d = b.shape[0]
            out[i : i + d, i : i + d] = b
            i += d
        return out

    def __repr__(self):
        return f"BlockOperator(block_dims={self.block_dims})"


def check_conforms(alg: TraceAlgebra, *xs: BlockOperator) -> None:
    for x in xs:
        if x.block_dims != alg.block_dims:
            raise ShapeMismatch(
                f"operator block dims {x.block_dims} do not match algebra {alg.block_dims}"
            )


def trace(alg: TraceAlgebra, x: BlockOperator) -> complex:
    check_conforms(alg, x)
    return complex(sum(w * np.trace(b) for w, b in zip(alg.weights, x.blocks)))


def inner(alg: TraceAlgebra, x: BlockOperator, y: BlockOperator) -> complex:
    """``<x, y> = tau(x y^*)``, linear in ``x``."""
    check_conforms(alg, x, y)
    # Tr(x y^*) = sum_ij x_ij conj(y_ij)
    return complex(sum(w * np.vdot(yb, xb) for w, xb, yb in zip(alg.weights, x.blocks, y.blocks)))


def conjugate_exponent(p: float) -> float:
    """Hölder conjugate ``q`` with ``1/p + 1/q = 1``; ``1 -> inf`` and ``inf -> 1``."""
    p = float(p)
    if math.isnan(p) or p < 1:
        raise BadExponent(f"exponent must be >= 1, got {p}")
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def _block_singular_values(x: BlockOperator) -> list[np.ndarray]:
    return [nk.singular_values(b) for b in x.blocks]


def opnorm(alg: TraceAlgebra, x: BlockOperator) -> float:
    """Operator norm: the largest singular value over all blocks."""
    check_conforms(alg, x)
    return float(max(s[0] for s in _block_singular_values(x)))


def pnorm(alg: TraceAlgebra, x: BlockOperator, p: float) -> float:
    """``||x||_p = tau(|x|^p)^{1/p}`` for ``p >= 1``; ``p = inf`` gives opnorm."""
    p = float(p)
    if math.isnan(p) or p < 1:
        raise BadExponent(f"p must be >= 1, got {p}")
    check_conforms(alg, x)
    if p == INF:
        return opnorm(alg, x)
    svals = _block_singular_values(x)
    top = max(s[0] for s in svals)
    if top == 0.0:
        return 0.0
    # factor out the largest singular value so large p cannot overflow
    total = sum(w * np.sum((s / top) ** p) for w, s in zip(alg.weights, svals))
    return float(top * total ** (1.0 / p))


def modulus(x: BlockOperator) -> BlockOperator:
    return x.map(nk.modulus)


def power(x: BlockOperator, t: float) -> BlockOperator:
    return x.map(lambda b: nk.power(b, t))


def polar(x: BlockOperator) -> tuple[BlockOperator, BlockOperator]:
    """Blockwise ``(u, |x|)`` with ``u`` the canonical partial isometry."""
    parts = [nk.polar(b) for b in x.blocks]
    return (
        BlockOperator(pd.isometry_part for pd in parts),
        BlockOperator(pd.modulus for pd in parts),
    )


def range_projection(x: BlockOperator) -> BlockOperator:
    return x.map(nk.range_projection)


def support_projection(x: BlockOperator) -> BlockOperator:
    """Range projection of ``|x|`` (the initial projection ``u^* u``)."""
    return x.map(lambda b: nk.range_projection(nk.adjoint(b)))
