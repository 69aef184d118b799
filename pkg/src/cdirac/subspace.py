"""Tolerance-aware linear subspace arithmetic over C and R.

Subspaces are stored as matrices with orthonormal columns.  Every rank
decision uses the same rule: a singular value counts when it is at least
``tol`` times the largest singular value (or times an explicit scale).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotConjugationStable

BUILTIN_TOL = 1e-9


def tol_from_env(environ=os.environ):
    """Tolerance from CDIRAC_TOL, or None when unset.  Raises ValueError if malformed."""
    raw = environ.get("CDIRAC_TOL")
    if raw is None or raw.strip() == "":
        return None
    val = float(raw)
    if not 0.0 < val < 1.0:
        raise ValueError(f"CDIRAC_TOL must lie in (0, 1), got {raw!r}")
    return val


try:
    DEFAULT_TOL = tol_from_env() or BUILTIN_TOL
except ValueError:
    DEFAULT_TOL = BUILTIN_TOL

# Ratio window above ``tol`` in which a rank decision is reported as marginal.
MARGINAL_FACTOR = 100.0

# Validity checks (isotropy, conjugation stability, ...) use this multiple of tol.
CHECK_FACTOR = 1e3


def numerical_rank(sv, tol=DEFAULT_TOL, scale=None):
    """Return ``(rank, marginal)`` for a descending array of singular values.

    ``scale`` defaults to the largest singular value.  ``marginal`` is true
    when some normalized singular value lies in ``[tol, MARGINAL_FACTOR*tol]``.
    """
    sv = np.asarray(sv, dtype=float)
    if sv.size == 0:
        return 0, False
    ref = sv[0] if scale is None else scale
    if ref <= 0.0:
        return 0, False
    ratio = sv / ref
    rank = int(np.count_nonzero(ratio >= tol))
    marginal = bool(np.any((ratio >= tol) & (ratio <= MARGINAL_FACTOR * tol)))
    return rank, marginal


@dataclass(frozen=True, eq=False)
class _Subspace:
    ambient_dim: int
    basis: np.ndarray
    tol: float = DEFAULT_TOL
    marginal: bool = field(default=False, compare=False)

    _dtype = complex

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=self._dtype)
        if basis.ndim != 2:
            basis = basis.reshape(self.ambient_dim, -1)
        if basis.shape[0] != self.ambient_dim:
            raise DimensionMismatch(
                f"basis has {basis.shape[0]} rows, ambient dimension is {self.ambient_dim}"
            )
        if basis.shape[1] > self.ambient_dim:
            raise DimensionMismatch("more basis vectors than the ambient dimension")
        if basis.shape[1]:
            gram = basis.conj().T @ basis
            err = np.max(np.abs(gram - np.eye(basis.shape[1])))
            if err > 1e3 * np.finfo(float).eps * max(1, basis.shape[1]):
                raise ValueError(f"basis columns are not orthonormal (error {err:.2e})")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def rank(self):
        return self.basis.shape[1]

    @property
    def dim(self):
        return self.basis.shape[1]

    def projector(self):
        return self.basis @ self.basis.conj().T

    def contains(self, v, tol=None):
        """Relative distance of ``v`` from the subspace is below ``tol``."""
        tol = self.tol if tol is None else tol
        v = np.asarray(v)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return True
        return distance_to(self, v) / nv < tol

    def __eq__(self, other):
        if not isinstance(other, _Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and gap(self, other) < max(self.tol, other.tol)

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}(ambient_dim={self.ambient_dim}, rank={self.rank})"


class ComplexSubspace(_Subspace):
    """Subspace of C^d with a Hermitian-orthonormal basis."""

    _dtype = complex


class RealSubspace(_Subspace):
    """Subspace of R^d with an orthonormal basis."""

    _dtype = float


def _kind(*spaces):
    return RealSubspace if all(isinstance(s, RealSubspace) for s in spaces) else ComplexSubspace


def _orth(mat, ambient_dim, cls, tol, scale=None):
    if ambient_dim == 0:
        return cls(0, np.zeros((0, 0), dtype=cls._dtype), tol)
    mat = np.asarray(mat, dtype=cls._dtype).reshape(ambient_dim, -1)
    if mat.shape[1] == 0:
        return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=cls._dtype), tol)
    u, sv, _ = np.linalg.svd(mat, full_matrices=False)
    rank, marginal = numerical_rank(sv, tol, scale)
    return cls(ambient_dim, np.ascontiguousarray(u[:, :rank]), tol, marginal)


def span(vectors, ambient_dim, tol=DEFAULT_TOL):
    """Orthonormalized complex span of ``vectors`` (a sequence or a column matrix)."""
    mat = _as_columns(vectors, ambient_dim)
    return _orth(mat, ambient_dim, ComplexSubspace, tol)


def real_span(vectors, ambient_dim, tol=DEFAULT_TOL):
    mat = _as_columns(vectors, ambient_dim)
    if np.iscomplexobj(mat):
        if np.max(np.abs(mat.imag), initial=0.0) > 0.0:
            raise ValueError("real_span received complex vectors")
        mat = mat.real
    return _orth(mat, ambient_dim, RealSubspace, tol)


def column_span(mat, tol=DEFAULT_TOL, real=False, scale=None):
    """Span of the columns of a 2-D array.

    ``scale`` replaces the largest singular value as the rank reference; pass
    1.0 when the columns come from an orthonormal frame so that an all-noise
    matrix is recognised as zero.
    """
    mat = np.asarray(mat)
    cls = RealSubspace if real else ComplexSubspace
    return _orth(mat.real if real else mat, mat.shape[0], cls, tol, scale)


def _as_columns(vectors, ambient_dim):
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        if vectors.shape[0] != ambient_dim:
            raise DimensionMismatch(
                f"vectors have length {vectors.shape[0]}, expected {ambient_dim}"
            )
        return vectors
    vectors = [np.asarray(v) for v in vectors]
    for v in vectors:
        if v.shape != (ambient_dim,):
            raise DimensionMismatch(f"vector of shape {v.shape}, expected ({ambient_dim},)")
    if not vectors:
        return np.zeros((ambient_dim, 0))
    return np.column_stack(vectors)


def zero(ambient_dim, real=False, tol=DEFAULT_TOL):
    cls = RealSubspace if real else ComplexSubspace
    return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=cls._dtype), tol)


def full(ambient_dim, real=False, tol=DEFAULT_TOL):
    cls = RealSubspace if real else ComplexSubspace
    return cls(ambient_dim, np.eye(ambient_dim, dtype=cls._dtype), tol)


def _check_same(a, b):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions {a.ambient_dim} and {b.ambient_dim} differ")


def null_space(mat, tol=DEFAULT_TOL, scale=None):
    """Return ``(basis, marginal)`` of the right null space of ``mat``."""
    mat = np.asarray(mat)
    ncols = mat.shape[1]
    if mat.shape[0] == 0 or ncols == 0:
        return np.eye(ncols, dtype=mat.dtype), False
    _, sv, vh = np.linalg.svd(mat, full_matrices=True)
    rank, marginal = numerical_rank(sv, tol, scale)
    if scale is None and sv.size and sv[0] == 0.0:
        rank = 0
    return vh[rank:].conj().T, marginal


def intersect(a, b):
    """A ∩ B from the null space of ``[basis_A | -basis_B]``, mapped through basis_A."""
    _check_same(a, b)
    cls = _kind(a, b)
    tol = max(a.tol, b.tol)
    if a.rank == 0 or b.rank == 0:
        return zero(a.ambient_dim, cls is RealSubspace, tol)
    stacked = np.hstack([a.basis, -b.basis])
    null, marginal = null_space(stacked, tol)
    vecs = a.basis @ null[: a.rank]
    out = _orth(vecs, a.ambient_dim, cls, tol)
    return cls(out.ambient_dim, out.basis, tol, marginal or out.marginal or a.marginal or b.marginal)


def sum_(a, b):
    """A + B."""
    _check_same(a, b)
    cls = _kind(a, b)
    tol = max(a.tol, b.tol)
    out = _orth(np.hstack([a.basis, b.basis]), a.ambient_dim, cls, tol)
    return cls(out.ambient_dim, out.basis, tol, out.marginal or a.marginal or b.marginal)


def conjugate(a):
    if isinstance(a, RealSubspace):
        return a
    return ComplexSubspace(a.ambient_dim, a.basis.conj(), a.tol, a.marginal)


def complexify(w):
    """W ⊗ C for a real subspace W."""
    return ComplexSubspace(w.ambient_dim, w.basis.astype(complex), w.tol, w.marginal)


def real_points(a):
    """The real subspace {v ∈ R^d : v ∈ A} of a conjugation-stable A."""
    if isinstance(a, RealSubspace):
        return a
    g = gap(a, conjugate(a))
    if g > CHECK_FACTOR * a.tol:
        raise NotConjugationStable(f"subspace differs from its conjugate (gap {g:.2e})")
    if a.rank == 0:
        return zero(a.ambient_dim, real=True, tol=a.tol)
    mat = np.hstack([a.basis.real, a.basis.imag])
    u, sv, _ = np.linalg.svd(mat, full_matrices=False)
    # A = Ā of complex dimension d has a real form of real dimension d.
    rank = a.rank
    _, marginal = numerical_rank(sv, a.tol)
    return RealSubspace(a.ambient_dim, np.ascontiguousarray(u[:, :rank]), a.tol, marginal or a.marginal)


def orthogonal_complement(a):
    """Euclidean (real) or Hermitian (complex) orthogonal complement."""
    cls = type(a)
    if a.rank == 0:
        return full(a.ambient_dim, cls is RealSubspace, a.tol)
    u, _, _ = np.linalg.svd(a.basis, full_matrices=True)
    return cls(a.ambient_dim, np.ascontiguousarray(u[:, a.rank:]), a.tol)


def pairing_gram(m):
    """Gram matrix of <X+ξ, Y+η> = ½(η(X) + ξ(Y)) in (vector, covector) coordinates.

    The pairing is bilinear, ⟨u, v⟩ = uᵀ P v, also over C.
    """
    half = 0.5 * np.eye(m)
    z = np.zeros((m, m))
    return np.block([[z, half], [half, z]])


def pair(u, v):
    """C-bilinear pairing of two vectors of C^{2m}."""
    u = np.asarray(u)
    m = u.shape[0] // 2
    return u @ pairing_gram(m) @ np.asarray(v)


def perp_pairing(a):
    """{v : vᵀ P w = 0 for all w ∈ A}."""
    if a.ambient_dim % 2:
        raise DimensionMismatch("pairing requires an even ambient dimension")
    m = a.ambient_dim // 2
    cls = type(a)
    if a.rank == 0:
        return full(a.ambient_dim, cls is RealSubspace, a.tol)
    null, marginal = null_space(a.basis.T @ pairing_gram(m), a.tol)
    out = _orth(null, a.ambient_dim, cls, a.tol)
    return cls(out.ambient_dim, out.basis, a.tol, marginal)


def isotropy_residual(a):
    """max |uᵀ P v| over basis pairs."""
    if a.rank == 0:
        return 0.0
    m = a.ambient_dim // 2
    return float(np.max(np.abs(a.basis.T @ pairing_gram(m) @ a.basis)))


def gap(a, b):
    """Operator-norm distance of the orthogonal projectors (sine of the largest principal angle)."""
    _check_same(a, b)
    if a.rank != b.rank:
        return 1.0
    if a.rank == 0 or a.rank == a.ambient_dim:
        return 0.0
    # sin θ_max = ||(I - P_B) Q_A||₂ for equal dimensions
    resid = a.basis - b.basis @ (b.basis.conj().T @ a.basis)
    return float(min(1.0, np.linalg.norm(resid, 2)))


def distance_to(a, v):
    """Euclidean distance from vector ``v`` to subspace ``a``."""
    v = np.asarray(v)
    if a.rank == 0:
        return float(np.linalg.norm(v))
    return float(np.linalg.norm(v - a.basis @ (a.basis.conj().T @ v)))


def direct_sum(*spaces):
    """Block-diagonal direct sum; the ambient space is the concatenation."""
    cls = _kind(*spaces)
    total = sum(s.ambient_dim for s in spaces)
    rank = sum(s.rank for s in spaces)
    out = np.zeros((total, rank), dtype=cls._dtype)
    row = col = 0
    for s in spaces:
        out[row : row + s.ambient_dim, col : col + s.rank] = s.basis
        row += s.ambient_dim
        col += s.rank
    tol = max((s.tol for s in spaces), default=DEFAULT_TOL)
    return cls(total, out, tol)
