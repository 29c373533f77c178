"""Seeded property corpus behind ``holdertrace selftest``."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import corpus
from . import holdercore as hc
from . import numkernel as nk
from . import oracle as orc
from . import tracealg as ta
from .holdercore import Status


def _holder_valid(alg, a, b, p):
    r = hc.holder_report(alg, a, b, p)
    return r.gap >= -1e-10 * (1 + r.rhs)


def _forward(alg, a, b, p):
    cert = hc.equality_certify(alg, a, b, p)
    return cert.status is Status.EQUALITY and cert.report.relative_gap <= 1e-9


def _converse(alg, a, b, p, seed):
    for eps in (1e-2, 1e-3):
        cert = hc.equality_certify(alg, corpus.perturb_modulus(alg, a, eps, seed), b, p)
        if cert.status is Status.EQUALITY or not cert.deviation > 0:
            return False
    return True


def _replay(alg, a, b, p, tight: bool):
    tr = hc.proof_replay(alg, a, b, p)
    ok = tr.holds(hc.ABS_TOL) and tr.exponent_residual <= 1e-12
    if tight:
        ok = ok and max(abs(s) for s in tr.slacks) <= 1e-8
    return ok


def _witness(alg, a, p):
    w = hc.dual_witness(alg, a, p)
    na = ta.pnorm(alg, a, p)
    q = ta.conjugate_exponent(p)
    return (
        abs(ta.pnorm(alg, w, q) - 1) <= 1e-10
        and abs(ta.inner(alg, a, w).real - na) <= 1e-9 * na
        and hc.equality_certify(alg, a, w, p).status is Status.EQUALITY
    )


def _eig(seed, n):
    m = corpus.random_hermitian(seed, n)
    lam, v = nk.herm_eig(m)
    return np.linalg.norm((v * lam) @ v.conj().T - m) <= 1e-10 * (1 + np.linalg.norm(m))


def run(seeds: int = 20, size: int = 6) -> dict:
    """Run every corpus family on ``seeds`` cases of block size <= ``size``."""
    checks: dict[str, Callable[[], list[bool]]] = {
        "holder_validity": lambda: [
            _holder_valid(*c) for c in corpus.holder_cases(seeds, size)
        ],
        "theorem_forward": lambda: [_forward(*c) for c in corpus.equality_cases(seeds, size)],
        "theorem_converse": lambda: [
            _converse(*c, seed=i) for i, c in enumerate(corpus.equality_cases(seeds, size))
        ],
        "proof_replay": lambda: [
            _replay(*c, tight=False) for c in corpus.holder_cases(seeds, size)
        ]
        + [_replay(*c, tight=True) for c in corpus.equality_cases(seeds, size)],
        "dual_witness": lambda: [
            _witness(alg, a, p)
            for alg, a in corpus.witness_cases(seeds, min(size, 4))
            for p in (1.5, 3.0)
        ],
        "cauchy_schwarz": lambda: [
            hc.cauchy_schwarz_certify(alg, x, y).equality
            and math.isclose(hc.cauchy_schwarz_certify(alg, x, y).lam, lam, rel_tol=1e-9)
            for alg, x, y, lam in corpus.cauchy_schwarz_proportional(seeds, size)
        ]
        + [
            not hc.cauchy_schwarz_certify(alg, x, y).equality
            for alg, x, y in corpus.cauchy_schwarz_generic(seeds, size)
        ],
        "trace_positivity": lambda: [
            (c := hc.trace_positivity_certify(alg, a)).equality and c.consistent
            for alg, a in corpus.positive_cases(seeds, size)
        ]
        + [
            not (c := hc.trace_positivity_certify(alg, a)).equality and c.consistent
            for alg, a in corpus.nonnormal_real_trace_cases(seeds, size)
        ],
        "p_one_boundary": lambda: [
            (c := hc.p_one_boundary_certify(alg, a, b)).equality and c.condition
            for alg, a, b in corpus.p_one_attaining_cases(seeds, size)
        ]
        + [
            not (c := hc.p_one_boundary_certify(alg, a, b)).equality and not c.condition
            for alg, a, b in corpus.p_one_generic_cases(seeds, size)
        ],
        "kernel_eig": lambda: [_eig(s, 1 + s % max(size, 1)) for s in range(seeds)],
        "random_determinism": lambda: [
            all(
                np.array_equal(x, y)
                for x, y in zip(
                    orc.random_operator(alg, orc.GeneratorSpec(s, "positive")).blocks,
                    orc.random_operator(alg, orc.GeneratorSpec(s, "positive")).blocks,
                )
            )
            for s in range(seeds)
            for alg in [orc.random_algebra(s, size)]
        ],
    }
    results = {}
    for name, fn in checks.items():
        try:
            outcomes = fn()
            results[name] = {"passed": int(sum(outcomes)), "total": len(outcomes)}
        except Exception as exc:  # report and keep going
            results[name] = {"passed": 0, "total": 0, "error": f"{type(exc).__name__}: {exc}"}
    ok = all(r["passed"] == r["total"] and "error" not in r for r in results.values())
    return {"seeds": seeds, "size": size, "checks": results, "ok": ok}
