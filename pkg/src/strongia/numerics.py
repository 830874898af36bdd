"""Tolerance-aware complex linear-algebra predicates.

Rank, subspace equality, column-subset matching and Hermitian
eigendecomposition, all parameterized by a single :class:`Tolerance`.
Exact span identities from the alignment theory only hold up to floating
point error, so every predicate here accepts a scale-aware threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ShapeError

__all__ = [
    "Tolerance",
    "Subspace",
    "orthonormal_basis",
    "subspace_equal",
    "subspace_residual",
    "column_subset",
    "column_subset_residual",
    "smallest_eigvecs",
]


@dataclass(frozen=True)
class Tolerance:
    """Relative/absolute threshold pair for rank and residual decisions.

    A quantity with natural scale ``s`` is treated as zero when it is
    below ``rel_tol * s + abs_tol``.  Defaults are sized for
    double-precision complex arithmetic.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12

    def __post_init__(self):
        if not (np.isfinite(self.rel_tol) and self.rel_tol > 0):
            raise InvalidInputError(f"rel_tol must be finite and positive, got {self.rel_tol}")
        if not (np.isfinite(self.abs_tol) and self.abs_tol > 0):
            raise InvalidInputError(f"abs_tol must be finite and positive, got {self.abs_tol}")

    def cutoff(self, scale: float) -> float:
        return self.rel_tol * scale + self.abs_tol


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class Subspace:
    """A subspace of C^tau held as an orthonormal basis.

    ``basis`` has shape (tau, dim) with orthonormal columns; ``dim`` may
    be zero for the trivial subspace.
    """

    basis: np.ndarray
    dim: int

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]


def _as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ShapeError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if a.shape[0] < 1:
        raise InvalidInputError(f"{name} must have at least one row")
    if a.size and not np.all(np.isfinite(a.view(float))):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return a


def orthonormal_basis(m, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the numerically significant column space of ``m``.

    Singular values below ``rel_tol * s_max + abs_tol`` are treated as
    zero, so the returned dimension is the numerical rank.
    """
    a = _as_complex_matrix(m)
    if a.shape[1] == 0:
        return Subspace(basis=np.zeros((a.shape[0], 0), dtype=complex), dim=0)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    cut = tol.cutoff(s[0] if s.size else 0.0)
    rank = int(np.sum(s > cut))
    return Subspace(basis=u[:, :rank], dim=rank)


def subspace_residual(a: Subspace, b: Subspace) -> float:
    """Largest projection residual between two subspaces, in both directions.

    Zero when the subspaces coincide; close to 1 when some basis vector
    of one is orthogonal to the other.
    """
    if a.ambient != b.ambient:
        raise ShapeError(f"ambient dimensions differ: {a.ambient} vs {b.ambient}")

    def one_way(x: Subspace, y: Subspace) -> float:
        if x.dim == 0:
            return 0.0
        resid = x.basis - y.basis @ (y.basis.conj().T @ x.basis)
        return float(np.max(np.linalg.norm(resid, axis=0)))

    return max(one_way(a, b), one_way(b, a))


def subspace_equal(a: Subspace, b: Subspace, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the two subspaces have equal dimension and coincide within tol.

    Basis columns are unit norm, so the residual threshold is
    ``rel_tol + abs_tol``.
    """
    if a.ambient != b.ambient:
        raise ShapeError(f"ambient dimensions differ: {a.ambient} vs {b.ambient}")
    if a.dim != b.dim:
        return False
    return subspace_residual(a, b) <= tol.cutoff(1.0)


def column_subset_residual(p, q, up_to_scale: bool = False) -> float:
    """Worst-case match distance of columns of ``p`` against columns of ``q``.

    For each column of ``p``, the best match over columns of ``q`` is the
    relative Euclidean distance (plain mode) or the relative residual
    after the optimal complex scaling of the candidate (``up_to_scale``).
    Returns the max over columns of ``p``; 0.0 when ``p`` has no columns,
    ``inf`` when ``q`` is empty but ``p`` is not.
    """
    pm = _as_complex_matrix(p, "p")
    qm = _as_complex_matrix(q, "q")
    if pm.shape[0] != qm.shape[0]:
        raise ShapeError(f"row counts differ: {pm.shape[0]} vs {qm.shape[0]}")
    if pm.shape[1] == 0:
        return 0.0
    if qm.shape[1] == 0:
        return float("inf")

    worst = 0.0
    qnorms = np.linalg.norm(qm, axis=0)
    for i in range(pm.shape[1]):
        col = pm[:, i]
        cnorm = np.linalg.norm(col)
        scale = np.maximum(qnorms, cnorm)
        scale = np.where(scale > 0, scale, 1.0)
        if up_to_scale:
            # residual of col after projecting onto each candidate direction
            coef = np.where(qnorms > 0, (qm.conj() * col[:, None]).sum(axis=0), 0.0)
            coef = np.where(qnorms > 0, coef / np.where(qnorms > 0, qnorms**2, 1.0), 0.0)
            resid = np.linalg.norm(col[:, None] - qm * coef[None, :], axis=0)
            denom = cnorm if cnorm > 0 else 1.0
            # a zero column only matches a zero column under nonzero scaling
            valid = (qnorms > 0) | (cnorm == 0)
            resid = np.where(valid, resid / denom, np.inf)
        else:
            resid = np.linalg.norm(qm - col[:, None], axis=0) / scale
        worst = max(worst, float(resid.min()))
    return worst


def column_subset(p, q, tol: Tolerance = DEFAULT_TOL, up_to_scale: bool = False) -> bool:
    """True iff every column of ``p`` matches some column of ``q``.

    Plain mode requires near-equality of the vectors; ``up_to_scale``
    accepts any nonzero complex scalar multiple.  Set semantics: an empty
    ``p`` is always a subset, and several columns of ``p`` may match the
    same column of ``q``.
    """
    return column_subset_residual(p, q, up_to_scale=up_to_scale) <= tol.cutoff(1.0)


def smallest_eigvecs(q, m: int, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Unit-norm eigenvectors of Hermitian ``q`` for the ``m`` smallest eigenvalues.

    Columns are ordered by ascending eigenvalue.  Raises if ``q`` is not
    Hermitian within tol or ``m`` is out of range.
    """
    a = _as_complex_matrix(q, "q")
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"q must be square, got shape {a.shape}")
    scale = float(np.linalg.norm(a))
    if np.linalg.norm(a - a.conj().T) > tol.cutoff(scale):
        raise InvalidInputError("q is not Hermitian within tolerance")
    if not 1 <= m <= a.shape[0]:
        raise InvalidInputError(f"m must be in [1, {a.shape[0]}], got {m}")
    _, vecs = np.linalg.eigh(0.5 * (a + a.conj().T))
    return vecs[:, :m]
