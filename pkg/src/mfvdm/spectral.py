"""Top-m eigenpairs of sparse Hermitian matrices.

Small matrices are handed to the dense Hermitian solver; larger ones use
Lanczos with full reorthogonalization, a seeded random start, and restarts
on breakdown.  Eigenvectors are returned in a fixed phase gauge (largest-
modulus entry real positive) so repeated runs agree bitwise; all downstream
quantities are gauge-invariant regardless.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from mfvdm.connection import SparseHermitian
from mfvdm.errors import ConvergenceError, MfvdmError, ParameterError
from mfvdm.rng import substream

__all__ = ["SpectralBundle", "gauge_fix", "top_eigenpairs",
           "DENSE_THRESHOLD"]

DENSE_THRESHOLD = 2000


@dataclass(frozen=True)
class SpectralBundle:
    """Top eigenvalues (descending) and orthonormal eigenvectors of one S_k."""

    k: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "eigenvalues",
                           np.asarray(self.eigenvalues, dtype=float))
        object.__setattr__(self, "eigenvectors",
                           np.asarray(self.eigenvectors, dtype=np.complex128))

    @property
    def m(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[0]

    def verify(self, matrix: SparseHermitian | None = None,
               tol: float = 1e-8, normalized: bool = True) -> None:
        """Check ordering, range, orthonormality and (optionally) residuals."""
        lam = self.eigenvalues
        if np.any(np.diff(lam) > 0.0):
            raise MfvdmError("Eigenvalues are not sorted descending.")
        if normalized and np.any(np.abs(lam) > 1.0 + tol):
            raise MfvdmError(
                f"Eigenvalues leave [-1, 1] by {np.abs(lam).max() - 1.0:g}."
            )
        gram = self.eigenvectors.conj().T @ self.eigenvectors
        ortho = np.abs(gram - np.eye(self.m)).max()
        if ortho > tol:
            raise MfvdmError(f"Eigenvectors not orthonormal: deviation "
                             f"{ortho:g} exceeds {tol:g}.")
        if matrix is not None:
            for a in range(self.m):
                resid = np.linalg.norm(
                    matrix.matvec(self.eigenvectors[:, a])
                    - lam[a] * self.eigenvectors[:, a]
                )
                if resid > tol:
                    raise MfvdmError(f"Residual {resid:g} of eigenpair {a} "
                                     f"exceeds {tol:g}.")


def gauge_fix(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column's phase so its largest-modulus entry is real > 0."""
    vectors = np.asarray(vectors, dtype=np.complex128)
    idx = np.argmax(np.abs(vectors), axis=0)
    lead = vectors[idx, np.arange(vectors.shape[1])]
    phase = lead / np.abs(lead)
    return vectors * np.conj(phase)[None, :]


def _dense_top(matrix: SparseHermitian, m: int) -> SpectralBundle:
    vals, vecs = np.linalg.eigh(matrix.to_dense())
    top = slice(None, matrix.n - m - 1 if matrix.n > m else None, -1)
    return SpectralBundle(k=matrix.k, eigenvalues=vals[top],
                          eigenvectors=gauge_fix(vecs[:, top]))


def _random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    q = rng.normal(size=n) + 1j * rng.normal(size=n)
    return q / np.linalg.norm(q)


def _lanczos_top(matrix: SparseHermitian, m: int, tol: float,
                 max_iters: int, seed: int) -> SpectralBundle:
    n = matrix.n
    rng = substream(seed, "lanczos", matrix.k)
    cap = min(n, max_iters)
    basis = np.zeros((n, cap), dtype=np.complex128)
    alphas = np.zeros(cap)
    betas = np.zeros(cap)
    basis[:, 0] = _random_unit(rng, n)

    def reorthogonalize(w: np.ndarray, size: int) -> np.ndarray:
        # two passes keep the basis orthonormal despite clustered spectra
        for _ in range(2):
            w = w - basis[:, :size] @ (basis[:, :size].conj().T @ w)
        return w

    def ritz(size: int, beta: float):
        lo = max(0, size - m)
        theta, s = eigh_tridiagonal(alphas[:size], betas[:size - 1],
                                    select="i", select_range=(lo, size - 1))
        bounds = beta * np.abs(s[-1, :])
        return theta, s, bounds

    j = 0
    bound_goal = tol
    while True:
        size = j + 1
        w = matrix.matvec(basis[:, j])
        alphas[j] = np.real(np.vdot(basis[:, j], w))
        w = reorthogonalize(w, size)
        beta = float(np.linalg.norm(w))

        if size >= m:
            theta, s, bounds = ritz(size, beta)
            at_limit = size == n or size == cap
            if at_limit or np.max(bounds) < bound_goal:
                vectors = basis[:, :size] @ s
                resid = np.empty(m)
                for a in range(m):
                    resid[a] = np.linalg.norm(matrix.matvec(vectors[:, a])
                                              - theta[a] * vectors[:, a])
                if np.max(resid) < tol or size == n:
                    order = np.argsort(theta, kind="stable")[::-1]
                    return SpectralBundle(
                        k=matrix.k, eigenvalues=theta[order],
                        eigenvectors=gauge_fix(vectors[:, order]),
                    )
                if size == cap:
                    raise ConvergenceError(
                        f"Lanczos did not reach residual {tol:g} within "
                        f"{cap} iterations (frequency k={matrix.k}).",
                        residuals=resid,
                    )
                # bound met but explicit residuals did not; demand better
                bound_goal = min(bound_goal, 0.1 * np.max(bounds))

        scale = max(1.0, np.abs(alphas[:size]).max(),
                    betas[:size].max(initial=0.0))
        if beta < 1e-12 * scale:
            # invariant subspace found; restart with a fresh direction
            betas[j] = 0.0
            fresh = reorthogonalize(_random_unit(rng, n), size)
            basis[:, j + 1] = fresh / np.linalg.norm(fresh)
        else:
            betas[j] = beta
            basis[:, j + 1] = w / beta
        j += 1


def top_eigenpairs(matrix: SparseHermitian, m: int, tol: float = 1e-8,
                   dense_threshold: int = DENSE_THRESHOLD,
                   max_iters: int | None = None,
                   seed: int = 0) -> SpectralBundle:
    """Compute the m algebraically largest eigenpairs of a Hermitian matrix.

    Parameters
    ----------
    matrix : SparseHermitian
    m : int
        Number of eigenpairs, 1 <= m <= n.
    tol : float
        Residual tolerance ||A u - lambda u|| for every returned pair.
    dense_threshold : int
        Use the dense solver when n is at or below this size.
    max_iters : int, optional
        Lanczos iteration cap; defaults to 50 * m.
    seed : int
        Seed for the Lanczos random start (fixed default keeps repeated
        runs bitwise identical).

    Returns
    -------
    bundle : SpectralBundle

    Raises
    ------
    ParameterError
        If m is out of range.
    ConvergenceError
        If the iteration cap is hit before residuals meet ``tol``.
    """
    if not 1 <= m <= matrix.n:
        raise ParameterError(f"m must satisfy 1 <= m <= n={matrix.n}. "
                             f"Got {m}.")
    if matrix.n <= dense_threshold:
        return _dense_top(matrix, m)
    if max_iters is None:
        max_iters = 50 * m
    return _lanczos_top(matrix, m, tol, max_iters, seed)
