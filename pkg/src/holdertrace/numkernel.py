"""Dense complex matrix kernels.

Everything downstream (moduli, fractional powers, polar factors, range
projections) is built on a single solver: cyclic Jacobi for Hermitian
matrices with complex rotations.  The SVD is obtained from the eigensystem
of ``m^* m``.

Tolerances
----------
HERM_TOL   relative asymmetry accepted as Hermitian
PSD_TOL    relative negative eigenvalue accepted as positive semidefinite
EIG_TOL    reconstruction / unitarity tolerance of the eigensolver
RANK_TOL   singular values (eigenvalues of PSD input) at or below
           ``RANK_TOL * max`` count as zero
"""

from __future__ import annotations

from typing import NamedTuple

import numba
import numpy as np

from .errors import NegativeExponent, NoConvergence, NotHermitian, NotPositive

HERM_TOL = 1e-12
PSD_TOL = 1e-10
EIG_TOL = 1e-10
RANK_TOL = 1e-12

JACOBI_OFF_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


class SpectralDecomp(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # unitary, columns are eigenvectors


class PolarDecomp(NamedTuple):
    isometry_part: np.ndarray  # canonical partial isometry u
    modulus: np.ndarray  # |m|
    unitary_extension: np.ndarray  # unitary agreeing with u on supp |m|


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a square, finite complex128 array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def adjoint(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def is_hermitian(m: np.ndarray, tol: float = HERM_TOL) -> bool:
    if m.size == 0:
        return True
    scale = 1.0 + np.max(np.abs(m))
    return bool(np.max(np.abs(m - m.conj().T)) <= tol * scale)


@numba.njit(cache=True)
def _jacobi_sweeps(a, thresh, max_sweeps):
    # In-place cyclic Jacobi on a Hermitian matrix; returns (v, sweeps, converged).
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j].real ** 2 + a[i, j].imag ** 2
        if np.sqrt(off) <= thresh:
            return v, sweep, True
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g == 0.0:
                    continue
                e = apq / g
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * g)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                se = s * e
                sec = s * e.conjugate()
                # columns: A <- A J with J = [[c, s e], [-s conj(e), c]]
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - sec * akq
                    a[k, q] = se * akp + c * akq
                # rows: A <- J^* A
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - se * aqk
                    a[q, k] = sec * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - sec * vkq
                    v[k, q] = se * vkp + c * vkq
    return v, max_sweeps, False


def herm_eig(m, max_sweeps: int = JACOBI_MAX_SWEEPS) -> SpectralDecomp:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.

    Raises NotHermitian when ``m`` is not Hermitian within HERM_TOL and
    NoConvergence when the off-diagonal mass does not drop below
    ``1e-14 * ||m||_F`` within ``max_sweeps`` sweeps.
    """
    m = as_matrix(m)
    if not is_hermitian(m):
        raise NotHermitian("matrix is not Hermitian")
    n = m.shape[0]
    if n == 0:
        return SpectralDecomp(np.zeros(0), np.zeros((0, 0), np.complex128))
    a = np.ascontiguousarray(hermitian_part(m))
    thresh = JACOBI_OFF_TOL * np.linalg.norm(a)
    v, _, converged = _jacobi_sweeps(a, thresh, max_sweeps)
    if not converged:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    lam = np.diag(a).real.copy()
    order = np.argsort(lam, kind="stable")
    return SpectralDecomp(lam[order], v[:, order])


def _orthonormal_completion(cols: np.ndarray, n: int) -> np.ndarray:
    """Gram-Schmidt (twice) of ``cols``, completed to a unitary with basis vectors."""
    basis: list[np.ndarray] = []

    def _push(vec: np.ndarray) -> bool:
        w = vec.astype(np.complex128, copy=True)
        norm0 = np.linalg.norm(w)
        if norm0 == 0.0:
            return False
        for _ in range(2):
            for b in basis:
                w -= (b.conj() @ w) * b
        norm = np.linalg.norm(w)
        if norm <= 1e-8 * norm0:
            return False
        basis.append(w / norm)
        return True

    for j in range(cols.shape[1]):
        _push(cols[:, j])
    k = 0
    while len(basis) < n:
        _push(np.eye(n, dtype=np.complex128)[:, k])
        k += 1
    return np.column_stack(basis) if basis else np.zeros((n, 0), np.complex128)


def _rank(s: np.ndarray) -> int:
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.count_nonzero(s > RANK_TOL * s[0]))


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(U, s, V)`` with ``m = U @ diag(s) @ V^*`` and ``s`` descending.

    Right singular vectors come from ``herm_eig(m^* m)``; singular values are
    read off as ``||m v_i||``, which stays accurate for the null directions.
    """
    m = as_matrix(m)
    n = m.shape[0]
    # scale first so that forming m^* m neither underflows nor overflows
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if scale == 0.0:
        scale = 1.0
    m = m / scale
    _, vecs = herm_eig(adjoint(m) @ m)
    mv = m @ vecs
    s = np.linalg.norm(mv, axis=0)
    order = np.argsort(-s, kind="stable")
    s, vecs, mv = s[order], vecs[:, order], mv[:, order]
    r = _rank(s)
    u = _orthonormal_completion(mv[:, :r] / s[:r], n)
    return u, s * scale, vecs


def polar(m) -> PolarDecomp:
    """Polar decomposition ``m = u |m|``.

    ``u`` is the canonical partial isometry (``u^* u`` is the support
    projection of ``|m|``); ``unitary_extension`` is a unitary with the same
    action on that support.
    """
    m = as_matrix(m)
    u, s, v = svd(m)
    r = _rank(s)
    vh = adjoint(v)
    iso = u[:, :r] @ vh[:r, :]
    mod = hermitian_part((v * s) @ vh)
    return PolarDecomp(iso, mod, u @ vh)


def power(m, t: float) -> np.ndarray:
    """Fractional power of a positive semidefinite matrix.

    Uses the convention ``0**t == 0`` for every ``t >= 0``, so ``power(m, 0)``
    is the support projection of ``m``.  Eigenvalues at or below
    ``RANK_TOL * lambda_max`` are treated as zero.
    """
    if t < 0:
        raise NegativeExponent(f"exponent must be >= 0, got {t}")
    m = as_matrix(m)
    lam, vecs = herm_eig(m)
    if lam.size == 0:
        return m.copy()
    top = np.max(np.abs(lam))
    if lam[0] < -PSD_TOL * top:
        raise NotPositive(f"smallest eigenvalue {lam[0]:.3e} is negative")
    keep = lam > RANK_TOL * top
    f = np.zeros_like(lam)
    f[keep] = lam[keep] ** t
    return hermitian_part((vecs * f) @ adjoint(vecs))


def modulus(m) -> np.ndarray:
    """``|m| = (m^* m)^{1/2}``; its eigenvalues are the singular values of ``m``."""
    return polar(m).modulus


def range_projection(m) -> np.ndarray:
    """Orthogonal projection onto the column space of ``m``."""
    m = as_matrix(m)
    u, s, _ = svd(m)
    ur = u[:, : _rank(s)]
    return hermitian_part(ur @ adjoint(ur))


def singular_values(m) -> np.ndarray:
    return svd(m)[1]
