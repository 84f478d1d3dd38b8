"""Deterministic dense spectral primitives.

Eigendecomposition of symmetric/Hermitian matrices by cyclic Jacobi
rotations, and a thin SVD built on top of it.  Everything here is a pure
function of its inputs: fixed sweep order, fixed convergence threshold and
a fixed eigenvector sign/phase convention make repeated calls on the same
matrix bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFinite, NonSymmetric

# Convergence: off-diagonal Frobenius norm relative to the input norm.
JACOBI_TOL = 1e-14
# Eigenvalues in [-PSD_CLAMP, 0) are treated as exact zeros.
PSD_CLAMP = 1e-12
# Singular values below RANK_TOL * largest do not count towards the rank.
RANK_TOL = 1e-10

_MAX_SWEEPS = 100


@dataclass(frozen=True)
class SymmetricEigen:
    """Full eigendecomposition of a symmetric/Hermitian matrix.

    ``eigenvalues`` is sorted descending; ``eigenvectors[:, k]`` is the unit
    eigenvector paired with ``eigenvalues[k]``.  The columns are pairwise
    orthonormal and each has its largest-magnitude component made real and
    positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class SVDResult:
    """Thin SVD ``A = U diag(s) Y^T`` keeping only the rank-r factors."""

    left_vectors: np.ndarray     # (N, r), columns u_k
    singular_values: np.ndarray  # (r,), descending
    right_vectors: np.ndarray    # (m, r), columns y_k
    rank: int


def _check_finite(a):
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix contains NaN or infinite entries")


def _fix_phases(vecs):
    """Make the largest-magnitude component of each column real-positive."""
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        j = int(np.argmax(np.abs(col)))
        pivot = col[j]
        if np.iscomplexobj(vecs):
            mag = abs(pivot)
            if mag > 0.0:
                vecs[:, k] = col * (np.conj(pivot) / mag)
        elif pivot < 0.0:
            vecs[:, k] = -col
    return vecs


def sym_eigen(mat, psd_clamp=PSD_CLAMP):
    """Eigendecompose a symmetric (or Hermitian) positive-semidefinite matrix.

    Parameters
    ----------
    mat : (n, n) array_like
        Real symmetric or complex Hermitian matrix.
    psd_clamp : float
        Eigenvalues in ``[-psd_clamp, 0)`` are clamped to 0.

    Returns
    -------
    SymmetricEigen

    Raises
    ------
    NonSymmetric
        If the asymmetry exceeds ``1e-12 * max(1, max|mat|)``.
    NonFinite
        If any entry is NaN or infinite.
    """
    a = np.asarray(mat)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    _check_finite(a)

    scale = float(np.max(np.abs(a)))
    asym = float(np.max(np.abs(a - a.conj().T)))
    if asym > 1e-12 * max(1.0, scale):
        raise NonSymmetric(f"asymmetry {asym:.3e} exceeds tolerance")

    complex_input = np.iscomplexobj(a)
    dtype = np.complex128 if complex_input else np.float64
    # Exact hermitization kills the (tolerated) asymmetry before iterating.
    work = ((a + a.conj().T) / 2.0).astype(dtype)
    n = work.shape[0]
    vecs = np.eye(n, dtype=dtype)

    norm = float(np.linalg.norm(work))
    target = JACOBI_TOL * norm
    # Elements below skip_tol cannot push the off-diagonal norm past target,
    # and skipping them keeps tau = diff / (2 r) safely away from overflow.
    skip_tol = target / max(1, 2 * n)
    for _ in range(_MAX_SWEEPS):
        off = work - np.diag(np.diag(work))
        off_sq = float(np.sum(np.abs(off) ** 2))
        if off_sq <= target * target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                r = abs(apq)
                if r <= skip_tol:
                    continue
                phase = apq / r  # modulus one; +-1 in the real case
                tau = float(work[q, q].real - work[p, p].real) / (2.0 * r)
                sign = 1.0 if tau >= 0.0 else -1.0
                t = sign / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # Unitary J: [[c, s], [-s*conj(phase), c*conj(phase)]] on (p, q).
                colp = work[:, p].copy()
                colq = work[:, q].copy()
                work[:, p] = c * colp - (s * np.conj(phase)) * colq
                work[:, q] = s * colp + (c * np.conj(phase)) * colq
                rowp = work[p, :].copy()
                rowq = work[q, :].copy()
                work[p, :] = c * rowp - (s * phase) * rowq
                work[q, :] = s * rowp + (c * phase) * rowq
                work[p, q] = 0.0
                work[q, p] = 0.0
                work[p, p] = work[p, p].real
                work[q, q] = work[q, q].real
                vp = vecs[:, p].copy()
                vq = vecs[:, q].copy()
                vecs[:, p] = c * vp - (s * np.conj(phase)) * vq
                vecs[:, q] = s * vp + (c * np.conj(phase)) * vq
    else:
        raise ArithmeticError("Jacobi sweep limit reached without convergence")

    vals = np.real(np.diag(work)).copy()
    vals[(vals < 0.0) & (vals >= -psd_clamp)] = 0.0

    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = _fix_phases(vecs[:, order])
    vals.flags.writeable = False
    vecs.flags.writeable = False
    return SymmetricEigen(eigenvalues=vals, eigenvectors=vecs)


def svd(mat, rank_tol=RANK_TOL):
    """Thin SVD of a real N x m matrix via the m x m Gram matrix.

    The Gram matrix ``A^T A`` is eigendecomposed; left vectors follow from
    ``u_i = A y_i / sqrt(lambda_i)`` for the ``r`` components whose singular
    value exceeds ``rank_tol`` times the largest one.  Components beyond the
    numerical rank are omitted.
    """
    a = np.asarray(mat, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {a.shape}")
    _check_finite(a)

    gram = a.T @ a
    eig = sym_eigen((gram + gram.T) / 2.0)
    svals = np.sqrt(np.maximum(eig.eigenvalues, 0.0))
    if svals.size and svals[0] > 0.0:
        rank = int(np.sum(svals > rank_tol * svals[0]))
    else:
        rank = 0

    y = eig.eigenvectors[:, :rank].copy()
    s = svals[:rank].copy()
    u = (a @ y) / s if rank else np.zeros((a.shape[0], 0))
    for arr in (u, s, y):
        arr.flags.writeable = False
    return SVDResult(left_vectors=u, singular_values=s, right_vectors=y, rank=rank)


def orthonormalize(rows, drop_tol=1e-12):
    """Modified Gram-Schmidt on the rows; near-dependent rows are dropped."""
    rows = np.asarray(rows, dtype=np.float64)
    out = []
    for v in rows:
        w = v.copy()
        for u in out:
            w -= (u @ w) * u
        nrm = float(np.linalg.norm(w))
        if nrm > drop_tol:
            out.append(w / nrm)
    if not out:
        return np.zeros((0, rows.shape[1] if rows.ndim == 2 else 0))
    return np.array(out)
