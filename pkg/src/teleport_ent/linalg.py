"""Dense complex linear algebra for small bipartite systems.

Everything operates on numpy complex128 arrays.  Matrices stay dense; the
package targets local dimensions d <= 8, so nothing here is tuned for size.
Decompositions are delegated to LAPACK via numpy, while the surrounding
contracts (ordering, reconstruction tolerances, hermiticity checks) are
enforced in this module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantError

# Results beyond this dimension signal a mis-sized request, not a real need.
DEFAULT_MAX_KRON_DIM = 4096

HERMITICITY_TOL = 1e-10


def ensure_matrix(m, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce to a 2-D complex128 array and reject non-finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise InvariantError(f"expected a 2-D matrix, got ndim={a.ndim}")
    if rows is not None and a.shape[0] != rows:
        raise InvariantError(f"expected {rows} rows, got {a.shape[0]}")
    if cols is not None and a.shape[1] != cols:
        raise InvariantError(f"expected {cols} columns, got {a.shape[1]}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise InvariantError("matrix contains non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conjugate(m.T)


def frobenius(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def is_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    return bool(np.abs(m - dagger(m)).max(initial=0.0) <= tol)


def kron(a, b, max_dim: int = DEFAULT_MAX_KRON_DIM) -> np.ndarray:
    """Kronecker product with a guard against runaway output sizes."""
    a = ensure_matrix(a)
    b = ensure_matrix(b)
    out_rows = a.shape[0] * b.shape[0]
    out_cols = a.shape[1] * b.shape[1]
    if out_rows > max_dim or out_cols > max_dim:
        raise InvariantError(
            f"kron output {out_rows}x{out_cols} exceeds the {max_dim} dimension cap"
        )
    return np.kron(a, b)


def partial_transpose(rho, d: int, subsystem: str = "A") -> np.ndarray:
    """Partial transpose of a d*d x d*d matrix over one d-dimensional factor.

    Index convention: row index (i, k) and column index (j, l) refer to
    basis |i>|k><j|<l|, flattened row-major.  Transposing subsystem A swaps
    i and j; subsystem B swaps k and l.
    """
    rho = ensure_matrix(rho, d * d, d * d)
    four = rho.reshape(d, d, d, d)
    if subsystem == "A":
        out = four.transpose(2, 1, 0, 3)
    elif subsystem == "B":
        out = four.transpose(0, 3, 2, 1)
    else:
        raise InvariantError(f"subsystem must be 'A' or 'B', got {subsystem!r}")
    return np.ascontiguousarray(out.reshape(d * d, d * d))


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin singular value decomposition, m = U diag(s) V^dagger, s descending."""
    m = ensure_matrix(m)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    return u, s, dagger(vh)


def trace_norm(m) -> float:
    """Sum of singular values."""
    m = ensure_matrix(m)
    return float(np.linalg.svd(m, compute_uv=False).sum())


@dataclass(frozen=True)
class HermitianEigenResult:
    """Eigendecomposition of a hermitian matrix.

    eigenvalues are ascending and real; eigenvectors are the matching
    orthonormal columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def herm_eig(m, tol: float = HERMITICITY_TOL) -> HermitianEigenResult:
    """Eigendecomposition restricted to (numerically) hermitian input."""
    m = ensure_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise InvariantError("herm_eig requires a square matrix")
    if not is_hermitian(m, tol):
        raise InvariantError("matrix is not hermitian within tolerance")
    w, v = np.linalg.eigh(m)
    return HermitianEigenResult(eigenvalues=w, eigenvectors=v)
