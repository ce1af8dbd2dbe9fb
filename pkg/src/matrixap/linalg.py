"""Hermitian functional calculus on (stacks of) positive definite matrices."""
from __future__ import annotations

import numpy as np

# Smallest admissible eigenvalue relative to the spectral radius.
EIG_FLOOR = 1e-13


class NearSingularMatrixError(ValueError):
    """A matrix is too close to singular for a fractional power."""

    def __init__(self, min_eigenvalue: float, max_eigenvalue: float, index=None):
        self.min_eigenvalue = float(min_eigenvalue)
        self.max_eigenvalue = float(max_eigenvalue)
        self.index = index
        where = "" if index is None else f" at sample {index}"
        super().__init__(f"near-singular matrix{where}: min eigenvalue {min_eigenvalue:.3e}, "
                         f"max eigenvalue {max_eigenvalue:.3e}")


def as_hermitian(M) -> np.ndarray:
    """Complex copy of ``M`` symmetrised to exact conjugate symmetry."""
    A = np.asarray(M, dtype=complex)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {A.shape}")
    return 0.5 * (A + np.conj(np.swapaxes(A, -1, -2)))


def _check_floor(lam: np.ndarray, floor: float):
    lo, hi = lam[..., 0], lam[..., -1]
    bad = ~((lo > floor * np.abs(hi)) & (hi > 0))
    if not np.any(bad):
        return
    if lam.ndim == 1:
        raise NearSingularMatrixError(lo, hi)
    idx = np.unravel_index(np.argmax(bad), bad.shape)
    raise NearSingularMatrixError(lo[idx], hi[idx], int(idx[0]) if len(idx) == 1 else idx)


def eigh_pd(M, floor: float = EIG_FLOOR):
    """Ascending eigendecomposition, rejecting matrices below the eigenvalue floor."""
    lam, U = np.linalg.eigh(as_hermitian(M))
    _check_floor(lam, floor)
    return lam, U


def fractional_power(M, s: float, floor: float = EIG_FLOOR) -> np.ndarray:
    """``M**s`` for Hermitian positive definite ``M`` (stacks allowed) via ``U diag(lam**s) U*``."""
    lam, U = eigh_pd(M, floor)
    out = (U * lam[..., None, :] ** s) @ np.conj(np.swapaxes(U, -1, -2))
    return as_hermitian(out)


def spectral_norm(A) -> np.ndarray:
    """Largest singular value, via the eigenvalues of the Hermitian ``A* A``."""
    A = np.asarray(A)
    G = np.conj(np.swapaxes(A, -1, -2)) @ A
    return np.sqrt(np.maximum(np.linalg.eigvalsh(G)[..., -1], 0.0))


def frobenius_norm(A) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(np.asarray(A)) ** 2, axis=(-2, -1)))


def matvec(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply stacked matrices ``(M, N, N)`` to vectors ``(N,)``, ``(K, N)`` -> ``(M, K, N)``."""
    x = np.atleast_2d(x)
    return np.einsum("mij,kj->mki", A, x)


def random_hpd(rng: np.random.Generator, n: int, cond: float = 100.0) -> np.ndarray:
    """Random Hermitian positive definite matrix with condition number ``cond``."""
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, _ = np.linalg.qr(Z)
    lam = np.geomspace(1.0, cond, n) * rng.uniform(0.5, 2.0)
    return as_hermitian((Q * lam) @ Q.conj().T)
