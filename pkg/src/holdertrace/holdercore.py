"""Hölder gap reports and equality certificates for trace p-norms.

The central fact checked here: for ``p > 1`` and nonzero ``a, b``,

    ||a b^*||_1 = ||a||_p ||b||_q   iff   |a|^p / ||a||_p^p = |b|^q / ||b||_q^q.

Floating point cannot decide an exact identity, so the certifiers return a
three-valued verdict: ``Equality`` and ``StrictInequality`` need both the
gap and the density deviation to agree, anything in between is
``Indeterminate``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import numkernel as nk
from . import tracealg as ta
from .errors import BadExponent, ZeroOperator
from .tracealg import BlockOperator, TraceAlgebra

DEFAULT_TOL = 1e-8
GRACE = 10.0
ABS_TOL = 1e-12  # slack tolerance of the replayed inequality chain


class Status(str, Enum):
    EQUALITY = "Equality"
    STRICT = "StrictInequality"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class HolderReport:
    p: float
    q: float
    lhs: float
    rhs: float
    gap: float
    relative_gap: float


@dataclass(frozen=True)
class EqualityCertificate:
    status: Status
    deviation: Optional[float]
    lam: Optional[float]
    tolerance: float
    report: HolderReport
    reason: Optional[str] = None


@dataclass(frozen=True)
class CauchySchwarzCertificate:
    holds: bool
    equality: bool
    lam: Optional[float]
    inner: complex
    bound: float
    residual: Optional[float] = None
    residual_bound: Optional[float] = None


@dataclass(frozen=True)
class PositivityCertificate:
    holds: bool
    equality: bool
    positive: bool
    trace: complex
    trace_modulus: float

    @property
    def consistent(self) -> bool:
        return self.equality == self.positive


@dataclass(frozen=True)
class POneCertificate:
    equality: bool
    condition: bool
    lhs: float
    rhs: float
    eigen_defect: float
    commutator_defect: float

    @property
    def consistent(self) -> bool:
        return self.equality == self.condition


@dataclass(frozen=True)
class ProofChainTrace:
    p: float
    p_eff: float
    swapped: bool
    normalized_a: BlockOperator
    normalized_b: BlockOperator
    w: BlockOperator
    x: BlockOperator
    y: BlockOperator
    r: float
    r_prime: float
    exponent_residual: float
    s0: float
    s1: float
    s2: float
    s3: float
    slacks: tuple[float, ...] = field(default=())

    @property
    def chain(self) -> tuple[float, ...]:
        return (self.s0, self.s1, self.s2, self.s3, 1.0)

    def holds(self, tol: float = ABS_TOL) -> bool:
        return all(s >= -tol for s in self.slacks)


def _check_p(p: float) -> tuple[float, float]:
    p = float(p)
    if not (p > 1 and math.isfinite(p)):
        raise BadExponent(f"p must be a finite number > 1, got {p}")
    return p, ta.conjugate_exponent(p)


def holder_report(alg: TraceAlgebra, a: BlockOperator, b: BlockOperator, p: float) -> HolderReport:
    p, q = _check_p(p)
    ta.check_conforms(alg, a, b)
    lhs = ta.pnorm(alg, a @ b.H, 1)
    rhs = ta.pnorm(alg, a, p) * ta.pnorm(alg, b, q)
    gap = rhs - lhs
    return HolderReport(p, q, lhs, rhs, gap, gap / rhs if rhs > 0 else 0.0)


def modulus_reduction_check(alg: TraceAlgebra, a: BlockOperator, b: BlockOperator) -> tuple[float, float]:
    """Return ``(||a b^*||_1, || |a||b| ||_1)``; the two must agree."""
    ta.check_conforms(alg, a, b)
    return (
        ta.pnorm(alg, a @ b.H, 1),
        ta.pnorm(alg, ta.modulus(a) @ ta.modulus(b), 1),
    )


def cauchy_schwarz_certify(
    alg: TraceAlgebra, x: BlockOperator, y: BlockOperator, tol: float = DEFAULT_TOL
) -> CauchySchwarzCertificate:
    """Cauchy-Schwarz for ``<x, y> = tau(x y^*)`` with its equality case.

    On equality with ``y != 0`` the proportionality constant
    ``||x||_2 / ||y||_2`` is returned and ``||x - lam y||_2`` is checked
    against the bound implied by the equality tolerance.
    """
    ta.check_conforms(alg, x, y)
    ip = ta.inner(alg, x, y)
    nx, ny = ta.pnorm(alg, x, 2), ta.pnorm(alg, y, 2)
    bound = nx * ny
    holds = abs(ip) <= bound + tol
    equality = ip.real >= bound - tol * (1.0 + bound)
    if not equality or ny == 0.0:
        return CauchySchwarzCertificate(holds, equality, None, ip, bound)
    lam = nx / ny
    residual = ta.pnorm(alg, x - lam * y, 2)
    # ||x - lam y||^2 = 2 lam (||x|| ||y|| - Re<x,y>), plus rounding
    residual_bound = math.sqrt(2.0 * lam * tol * (1.0 + bound)) + 1e-12 * (1.0 + nx)
    if residual > residual_bound:
        equality = False
        lam = None
    return CauchySchwarzCertificate(holds, equality, lam, ip, bound, residual, residual_bound)


def is_positive(x: BlockOperator) -> bool:
    for blk in x.blocks:
        if not nk.is_hermitian(blk):
            return False
        lam = nk.herm_eig(nk.hermitian_part(blk)).eigenvalues
        if lam[0] < -nk.PSD_TOL * max(1.0, float(np.max(np.abs(lam)))):
            return False
    return True


def trace_positivity_certify(
    alg: TraceAlgebra, a: BlockOperator, tol: float = DEFAULT_TOL
) -> PositivityCertificate:
    """``|tau(a)| <= tau(|a|)``, with ``tau(a) = tau(|a|)`` exactly for positive ``a``."""
    ta.check_conforms(alg, a)
    t = ta.trace(alg, a)
    tm = ta.trace(alg, ta.modulus(a)).real
    holds = abs(t) <= tm + tol
    equality = t.real >= tm - tol * (1.0 + tm)
    return PositivityCertificate(holds, equality, is_positive(a), t, tm)


def swap_normalize(p: float) -> tuple[float, bool]:
    """Map ``p`` into ``(1, 2]``; ``swapped`` means the caller exchanges ``a`` and ``b``."""
    p, q = _check_p(p)
    if p <= 2:
        return p, False
    return q, True


def _density(alg: TraceAlgebra, x: BlockOperator, p: float) -> BlockOperator:
    # |x|^p / ||x||_p^p, computed on the normalized operator
    return ta.power(ta.modulus(x / ta.pnorm(alg, x, p)), p)


def equality_certify(
    alg: TraceAlgebra,
    a: BlockOperator,
    b: BlockOperator,
    p: float,
    tol: float = DEFAULT_TOL,
    grace: float = GRACE,
) -> EqualityCertificate:
    p, q = _check_p(p)
    report = holder_report(alg, a, b, p)
    na, nb = ta.pnorm(alg, a, p), ta.pnorm(alg, b, q)
    if na == 0.0 or nb == 0.0:
        lam = na**p / nb**q if nb > 0 else None
        return EqualityCertificate(Status.INDETERMINATE, None, lam, tol, report, "zero_operator")
    lam = na**p / nb**q
    deviation = ta.pnorm(alg, _density(alg, a, p) - _density(alg, b, q), 1)
    rel = report.relative_gap
    if deviation <= tol and rel <= tol:
        return EqualityCertificate(Status.EQUALITY, deviation, lam, tol, report)
    if deviation > grace * tol and rel > grace * tol:
        return EqualityCertificate(Status.STRICT, deviation, lam, tol, report)
    small_dev, small_gap = deviation <= grace * tol, rel <= grace * tol
    reason = "gray_zone" if small_dev == small_gap else "criteria_disagree"
    return EqualityCertificate(Status.INDETERMINATE, deviation, lam, tol, report, reason)


def dual_witness(alg: TraceAlgebra, a: BlockOperator, p: float) -> BlockOperator:
    """Unit ``q``-norm operator ``b`` with ``tau(a b^*) = ||a||_p``.

    ``b = u |a|^{p-1} / ||a||_p^{p-1}`` where ``a = u|a|``.
    """
    p, _ = _check_p(p)
    ta.check_conforms(alg, a)
    norm = ta.pnorm(alg, a, p)
    if norm <= nk.RANK_TOL:
        raise ZeroOperator("dual witness of the zero operator is undefined")
    u, mod = ta.polar(a / norm)
    return u @ ta.power(mod, p - 1.0)


def proof_replay(alg: TraceAlgebra, a: BlockOperator, b: BlockOperator, p: float) -> ProofChainTrace:
    """Evaluate every quantity of the Cauchy-Schwarz based equality argument.

    With ``||a||_p = ||b||_q = 1`` and ``p`` in ``(1, 2]``::

        s0 = tau(x y^*)                           x = w^* |a|^{p/2}
        s1 = ||x||_2 ||y||_2                      y = |b| |a|^{1-p/2}
        s2 = tau(|b|^2 |a|^{2-p})^{1/2}
        s3 = (tau|b|^q)^{1/(2r)} (tau|a|^{(2-p)r'})^{1/(2r')},  r = q/2

    where ``w`` is the polar factor of ``|a||b|``.  Each must be at most the
    next, and ``s3 <= 1``.
    """
    p_in, _ = _check_p(p)
    ta.check_conforms(alg, a, b)
    if a.is_zero() or b.is_zero():
        raise ZeroOperator("proof replay needs a != 0 and b != 0")
    p, swapped = swap_normalize(p_in)
    if swapped:
        a, b = b, a
    q = ta.conjugate_exponent(p)
    a = a / ta.pnorm(alg, a, p)
    b = b / ta.pnorm(alg, b, q)
    ma, mb = ta.modulus(a), ta.modulus(b)

    w, _ = ta.polar(ma @ mb)
    x = w.H @ ta.power(ma, p / 2)
    y = mb @ ta.power(ma, 1 - p / 2)  # p = 2 gives |a|^0, the support projection

    s0 = ta.inner(alg, x, y).real
    s1 = ta.pnorm(alg, x, 2) * ta.pnorm(alg, y, 2)
    s2 = math.sqrt(max(ta.trace(alg, mb @ mb @ ta.power(ma, 2 - p)).real, 0.0))

    r = q / 2
    if r > 1:
        # r / (r - 1) rewritten without the cancellation in r - 1 near p = 2
        r_prime = p / (2 - p)
        e = (2 - p) * r_prime
        exponent_residual = abs(e - p)
        b_part = ta.trace(alg, ta.power(mb, q)).real ** (1 / (2 * r))
        a_part = ta.trace(alg, ta.power(ma, e)).real ** (1 / (2 * r_prime))
        s3 = b_part * a_part
    else:
        # p = q = 2: r = 1, r' = inf and the bound is ||b||_2 ||p_a||^{1/2}
        r_prime = math.inf
        exponent_residual = 0.0
        s3 = math.sqrt(ta.trace(alg, mb @ mb).real * ta.opnorm(alg, ta.power(ma, 0)))

    slacks = (s1 - s0, s2 - s1, s3 - s2, 1.0 - s3)
    return ProofChainTrace(
        p_in, p, swapped, a, b, w, x, y, r, r_prime, exponent_residual,
        s0, s1, s2, s3, slacks,
    )


def p_one_boundary_certify(
    alg: TraceAlgebra, a: BlockOperator, b: BlockOperator, tol: float = DEFAULT_TOL
) -> POneCertificate:
    """Equality ``||a b^*||_1 = ||a||_1 ||b||_inf`` against its spectral condition.

    The condition is ``p_a |b| = ||b||_inf p_a = |b| p_a`` where ``p_a`` is the
    support projection of ``|a|``.
    """
    ta.check_conforms(alg, a, b)
    if a.is_zero() or b.is_zero():
        raise ZeroOperator("p = 1 certificate needs a != 0 and b != 0")
    lhs = ta.pnorm(alg, a @ b.H, 1)
    binf = ta.opnorm(alg, b)
    rhs = ta.pnorm(alg, a, 1) * binf
    equality = lhs >= rhs - tol * (1.0 + rhs)

    pa = ta.power(ta.modulus(a), 0)
    mb = ta.modulus(b)
    eigen_defect = ta.pnorm(alg, pa @ mb - binf * pa, 1)
    commutator = ta.pnorm(alg, pa @ mb - mb @ pa, 1)
    scale = tol * (1.0 + binf)
    condition = eigen_defect <= scale and commutator <= scale
    return POneCertificate(equality, condition, lhs, rhs, eigen_defect, commutator)


def commutator_defect(alg: TraceAlgebra, a: BlockOperator, b: BlockOperator) -> float:
    """``|| |a||b| - |b||a| ||_1``."""
    ma, mb = ta.modulus(a), ta.modulus(b)
    return ta.pnorm(alg, ma @ mb - mb @ ma, 1)
