"""Dense complex linear algebra for small Hilbert spaces (dimension 2 to 8).

Everything operates on plain complex numpy arrays. Matrices that are
supposed to be Hermitian are checked against a relative Frobenius
tolerance and symmetrized as (M + M^dag)/2 before any eigendecomposition,
since time integration tends to accumulate tiny anti-Hermitian parts.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import BadDimension, NotHermitian

HERMITICITY_TOL = 1e-10

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
# Basis convention: index 0 is the excited level, index 1 the ground level.
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)

KET_E = np.array([1.0, 0.0], dtype=complex)
KET_G = np.array([0.0, 1.0], dtype=complex)


class EigenDecomposition(NamedTuple):
    """Eigenvalues sorted ascending and matching orthonormal column vectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise BadDimension(f"expected a square matrix, got shape {m.shape}")
    return m


def hermitian_part(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Symmetrize m, raising NotHermitian if it deviates beyond tol (relative)."""
    m = _as_square(m)
    dev = np.linalg.norm(m - m.conj().T)
    scale = max(np.linalg.norm(m), 1.0)
    if dev > tol * scale:
        raise NotHermitian(f"relative anti-Hermitian part {dev / scale:.3e} exceeds {tol:.1e}")
    return 0.5 * (m + m.conj().T)


def eig_hermitian(m) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix (ascending eigenvalues)."""
    h = hermitian_part(m)
    w, v = np.linalg.eigh(h)
    return EigenDecomposition(w, v)


def psd_min_eig(m) -> float:
    """Smallest eigenvalue; m counts as PSD when this is >= -tol for the caller's tol."""
    h = hermitian_part(m)
    return float(np.linalg.eigvalsh(h)[0])


def psd_project(m) -> np.ndarray:
    """Projection onto the PSD cone: clip negative eigenvalues and rebuild."""
    w, v = eig_hermitian(m)
    w = np.maximum(w, 0.0)
    return (v * w) @ v.conj().T


def kron(a, b) -> np.ndarray:
    """Kronecker product, first factor on the left (slow) index."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(m, keep: int) -> np.ndarray:
    """Trace out one qubit of a two-qubit operator.

    keep=1 keeps the first factor, keep=2 the second.
    """
    m = _as_square(m)
    if m.shape != (4, 4):
        raise BadDimension(f"partial_trace expects a 4x4 matrix, got {m.shape}")
    r = m.reshape(2, 2, 2, 2)
    if keep == 1:
        return np.einsum("ijkj->ik", r)
    if keep == 2:
        return np.einsum("ijil->jl", r)
    raise BadDimension(f"keep must be 1 or 2, got {keep}")


def frobenius_inner(a, b) -> complex:
    """Tr(a^dag b); conjugate-symmetric in its arguments."""
    a = _as_square(a)
    b = _as_square(b)
    if a.shape != b.shape:
        raise BadDimension(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.einsum("ij,ij->", a.conj(), b))
