"""Dense symmetric linear algebra kernels and scalar root bisection.

Matrices are plain ``numpy`` arrays; only the lower triangle is read, so
callers may pass matrices whose upper triangle is stale.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.optimize
import scipy.sparse
import scipy.sparse.linalg

from .errors import MassNotPositiveDefinite, NoConvergence, NoSignChange, SingularMatrix


def sym_matrix(a) -> np.ndarray:
    """Square float array rebuilt from its lower triangle."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    low = np.tril(a)
    return low + np.tril(a, -1).T


def inf_norm(a) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.abs(a).sum(axis=1).max()) if a.size else 0.0


@dataclass(frozen=True)
class Inertia:
    n_negative: int
    n_zero: int
    n_positive: int
    zero_tolerance: float

    @property
    def n(self) -> int:
        return self.n_negative + self.n_zero + self.n_positive

    @property
    def positive_definite(self) -> bool:
        return self.n_negative == 0 and self.n_zero == 0


def default_zero_tol(a) -> float:
    return 1e-10 * inf_norm(a)


def inertia(a, zero_tol: float | None = None) -> Inertia:
    """Count eigenvalues below ``-zero_tol``, within ``±zero_tol`` and above it."""
    a = sym_matrix(a)
    tol = default_zero_tol(a) if zero_tol is None else float(zero_tol)
    if a.shape[0] == 0:
        return Inertia(0, 0, 0, tol)
    w = eig_sym(a, vectors=False)
    neg = int(np.count_nonzero(w < -tol))
    pos = int(np.count_nonzero(w > tol))
    return Inertia(neg, a.shape[0] - neg - pos, pos, tol)


def solve_sym(a, rhs, tol: float | None = None) -> np.ndarray:
    """Solve ``a x = rhs`` through a symmetric indefinite (Bunch-Kaufman) factorization.

    Raises :class:`SingularMatrix` when a pivot block of the ``LDL^T``
    factorization has an eigenvalue of modulus below ``tol``
    (default ``1e-10 * ||a||_inf``).
    """
    a = sym_matrix(a)
    rhs = np.asarray(rhs, dtype=float)
    n = a.shape[0]
    if n == 0:
        return np.zeros_like(rhs)
    tol = default_zero_tol(a) if tol is None else tol
    _, d, _ = sla.ldl(a, lower=True)
    i = 0
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0.0:
            piv = np.linalg.eigvalsh(d[i:i + 2, i:i + 2])
            i += 2
        else:
            piv = np.array([d[i, i]])
            i += 1
        if np.min(np.abs(piv)) <= tol:
            raise SingularMatrix(f"pivot of modulus {np.min(np.abs(piv)):.3e} below tolerance {tol:.3e}")
    return sla.solve(a, rhs, assume_a="sym", check_finite=False)


def eig_sym(a, vectors: bool = True):
    """Ascending eigenvalues (and orthonormal eigenvectors as columns)."""
    a = sym_matrix(a)
    try:
        if vectors:
            return np.linalg.eigh(a, UPLO="L")
        return np.linalg.eigvalsh(a, UPLO="L")
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def eig_gen_sym(k, m, count: int = 1, vectors: bool = True):
    """Smallest ``count`` eigenpairs of ``k x = lam m x`` with ``m`` positive definite."""
    k = sym_matrix(k)
    m = sym_matrix(m)
    n = k.shape[0]
    count = min(count, n)
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise MassNotPositiveDefinite(str(exc)) from exc
    try:
        out = sla.eigh(k, m, lower=True, subset_by_index=[0, count - 1], eigvals_only=not vectors,
                       check_finite=False)
    except sla.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return out


def eig_gen_sym_sparse(k, m, sigma: float, count: int = 1, vectors: bool = False):
    """Eigenvalues of ``k x = lam m x`` nearest to ``sigma`` (shift-invert Lanczos).

    Used for fine finite-element meshes where dense factorizations would be
    too slow. With ``sigma`` below the spectrum the result is the bottom of it.
    """
    k = scipy.sparse.csc_matrix(k)
    m = scipy.sparse.csc_matrix(m)
    n = k.shape[0]
    count = min(count, n - 1)
    try:
        out = scipy.sparse.linalg.eigsh(k, k=count, M=m, sigma=sigma, which="LM",
                                        return_eigenvectors=vectors, tol=1e-14)
    except (scipy.sparse.linalg.ArpackNoConvergence, RuntimeError) as exc:
        raise NoConvergence(str(exc)) from exc
    if not vectors:
        return np.sort(out)
    w, v = out
    order = np.argsort(w)
    return w[order], v[:, order]


def bisect_root(f, lo: float, hi: float, tol: float = 1e-13, maxiter: int = 400) -> float:
    """Root of ``f`` in a sign-changing bracket, returned once the bracket is below ``tol``."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return float(lo)
    if fhi == 0:
        return float(hi)
    if np.sign(flo) == np.sign(fhi):
        raise NoSignChange(f"f({lo})={flo:.3e} and f({hi})={fhi:.3e} have the same sign")
    return float(scipy.optimize.bisect(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=maxiter))
