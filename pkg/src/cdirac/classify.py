"""Structural algorithms on a single complex Dirac point.

The associated real Dirac structure, the pointwise normal form
e^B(L_{iω_Δ} × L_(C,J)), the extremal-type normalizations, the CR-type
predicate, leaf restriction and tetrahedron coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dirac as dr
from . import subspace as ss
from .errors import (
    InvalidStructure,
    KMismatch,
    NotLagrangian,
    ReconstructionFailure,
    TypeNotMaximal,
    TypeNotZero,
)
from .subspace import CHECK_FACTOR, ComplexSubspace, RealSubspace


def hat(L):
    """The real lagrangian {X + Im ξ : X + ξ ∈ L, X real} ⊂ V ⊕ V*."""
    m = L.dim_v
    tol = L.tol
    if m == 0:
        return ss.zero(0, real=True, tol=tol)
    u = L.basis
    top = u[:m]
    # c = a + ib with Im(top @ c) = 0
    null, _ = ss.null_space(np.hstack([top.imag, top.real]), tol, scale=1.0)
    c = null[:m] + 1j * null[m:]
    elems = u @ c
    frame = np.vstack([elems[:m].real, elems[m:].imag])
    out = ss.column_span(frame, tol, real=True, scale=1.0)
    if out.rank != m:
        raise NotLagrangian(f"hat(L) has dimension {out.rank}, expected {m}")
    return out


def hat_from_invariants(L, record=None):
    """L(Δ, ω_Δ) assembled from the invariant record."""
    rec = dr.invariants(L) if record is None else record
    return dr.real_graph(rec.delta, rec.omega_delta, L.tol)


def _orth_complement_within(outer, inner):
    """Orthonormal basis of the Euclidean complement of span(inner) inside span(outer)."""
    if inner.shape[1] == 0:
        return outer
    coords = outer.T @ inner
    u, _, _ = np.linalg.svd(coords, full_matrices=True)
    return outer @ u[:, inner.shape[1] :]


def split_k_correction(L):
    """Real two-form B1 with K(e^{-B1} L) = Δ₀ ⊕ (K ∩ V*).

    K is brought to the form {x_i + α_i} ∪ {ζ_j} with (x_i) an orthonormal
    basis of Δ₀ and ζ_j ∈ Ann D; then B1(x_i, ·) = α_i on D, B1 vanishes on
    the complement of Δ₀ in D paired with itself and off D.
    """
    rec = dr.invariants(L)
    m = L.dim_v
    p = rec.rank_delta0
    if p == 0:
        return np.zeros((m, m))
    kb = rec.k_basis.basis
    u, sv, wt = np.linalg.svd(kb[:m], full_matrices=False)
    x = u[:, :p]
    alpha = (kb[m:] @ wt.T)[:, :p] / sv[:p]
    y = _orth_complement_within(rec.d.basis, x)
    z = ss.orthogonal_complement(rec.d).basis
    frame = np.hstack([x, y, z])
    nb = frame.shape[1]
    coef = np.zeros((nb, nb))
    xx = alpha.T @ x
    coef[:p, :p] = 0.5 * (xx - xx.T)
    xy = alpha.T @ y
    coef[:p, p : p + y.shape[1]] = xy
    coef[p : p + y.shape[1], :p] = -xy.T
    return frame @ coef @ frame.T


def _conjugate_symmetric_extension(R, T, g_rr, g_rt, g_tt):
    """Real two-form on V restricting to γ on Δ_C ⊕ T.

    γ is given by blocks on the basis (R, T); the values on T̄ are the
    conjugates, the T×T̄ block and every direction outside D are zero.
    """
    m = R.shape[0]
    d_real = np.hstack([R, T.real, T.imag]) if T.shape[1] else R
    dsub = ss.column_span(d_real, real=True, scale=1.0) if d_real.shape[1] else ss.zero(m, real=True)
    Z = ss.orthogonal_complement(dsub).basis
    basis = np.hstack([R.astype(complex), T, T.conj(), Z.astype(complex)])
    if basis.shape[1] != m:
        raise InvalidStructure("Δ ⊕ T ⊕ T̄ does not have the expected dimension")
    a, b = R.shape[1], T.shape[1]
    r_, t_, tb_ = slice(0, a), slice(a, a + b), slice(a + b, a + 2 * b)
    G = np.zeros((m, m), complex)
    G[r_, r_] = g_rr.real
    G[r_, t_] = g_rt
    G[t_, r_] = -g_rt.T
    G[r_, tb_] = g_rt.conj()
    G[tb_, r_] = -g_rt.conj().T
    G[t_, t_] = g_tt
    G[tb_, tb_] = g_tt.conj()
    inv = np.linalg.inv(basis)
    form = inv.T @ G @ inv
    return 0.5 * (form.real - form.real.T), float(np.max(np.abs(form.imag), initial=0.0))


def _eps_blocks(L, R, T):
    q = L.E.basis
    cr = q.conj().T @ R
    ct = q.conj().T @ T
    eps = L.eps
    return cr.T @ eps @ cr, cr.T @ eps @ ct, ct.T @ eps @ ct


def _t10_of(L, delta):
    """Orthogonal projection of E onto the complement of Δ_C (a lift of E/Δ_C)."""
    m = L.dim_v
    N = ss.orthogonal_complement(delta).basis
    proj = N @ (N.T @ L.E.basis)
    return ss.column_span(proj, L.tol, scale=1.0) if proj.shape[1] else ss.zero(m, tol=L.tol), N


@dataclass(frozen=True, eq=False)
class NormalForm:
    """Data of L = e^B(L_{iω_Δ} × L_(C,J)) with V = Δ ⊕ N.

    ``t10`` is the +i eigenspace of J on C, stored in V coordinates (it lies
    inside N_C).  ``residual`` is the gap between the reconstruction and L.
    """

    B: np.ndarray
    delta: RealSubspace
    omega_delta: np.ndarray
    complement: RealSubspace
    t10: ComplexSubspace
    b1: np.ndarray = field(repr=False)
    residual: float = 0.0

    @property
    def m(self):
        return self.B.shape[0]

    def t10_in_complement(self):
        """T_{1,0} in the coordinates of the stored frame of N."""
        n = self.complement.basis
        return ss.column_span(n.T @ self.t10.basis, self.t10.tol, scale=1.0)

    def presymplectic_factor(self):
        if self.delta.rank == 0:
            return dr.point_space()
        return dr.from_presymplectic(self.omega_delta, self.delta.tol)

    def cr_factor(self):
        if self.complement.rank == 0:
            return dr.point_space()
        return dr.from_cr(self.t10_in_complement())

    def reconstruct(self):
        """e^B(L_{iω_Δ} × L_(C,J)) in the original coordinates of V."""
        prod = dr.product(self.presymplectic_factor(), self.cr_factor())
        g = np.hstack([self.delta.basis, self.complement.basis])
        return dr.b_transform(dr.transform(prod, g), self.B)


def normal_form(L, check=True):
    """Pointwise normal form L = e^B(L_{iω_Δ} × L_(C,J)).

    Raises ReconstructionFailure when the recomposed structure is farther
    than the tolerance from L.
    """
    tol = L.tol
    b1 = split_k_correction(L)
    L1 = dr.b_transform(L, -b1)
    rec = dr.invariants(L1)
    R = rec.delta.basis
    t10, N = _t10_of(L1, rec.delta)
    T = t10.basis
    e_rr, e_rt, e_tt = _eps_blocks(L1, R, T)
    g_rr = e_rr - 1j * rec.omega_delta
    b2, _ = _conjugate_symmetric_extension(R, T, g_rr, e_rt, e_tt)
    nf = NormalForm(
        B=b1 + b2,
        delta=rec.delta,
        omega_delta=rec.omega_delta,
        complement=RealSubspace(L.dim_v, N, tol),
        t10=t10,
        b1=b1,
    )
    resid = ss.gap(nf.reconstruct().space, L.space)
    nf = NormalForm(nf.B, nf.delta, nf.omega_delta, nf.complement, nf.t10, nf.b1, resid)
    if check and resid >= CHECK_FACTOR * tol:
        raise ReconstructionFailure("normal form does not reconstruct L", resid)
    return nf


def type0_normal_form(L):
    """(Δ, ω, B) with L = e^B L(Δ_C, iω), for type-zero L."""
    rec = dr.invariants(L)
    if rec.k != 0:
        raise TypeNotZero(f"type is {rec.k}, expected 0")
    delta = rec.delta
    eps_delta = dr.form_on_real(L, delta)
    b_part = eps_delta.real
    b_part = 0.5 * (b_part - b_part.T)
    R = delta.basis
    return delta, rec.omega_delta, R @ b_part @ R.T


def type0_reconstruct(delta, omega, B):
    inner = dr.make_dirac(ss.complexify(delta), 1j * np.asarray(omega))
    return dr.b_transform(inner, B)


def max_type_normal_form(L):
    """(E, B) with L = e^B L(E, 0), for L of maximal type (m - r)/2."""
    rec = dr.invariants(L)
    if 2 * rec.k != rec.m - rec.r:
        raise TypeNotMaximal(f"type is {rec.k}, maximal is {(rec.m - rec.r) // 2}")
    R = rec.delta.basis
    t10, _ = _t10_of(L, rec.delta)
    T = t10.basis
    e_rr, e_rt, e_tt = _eps_blocks(L, R, T)
    B, _ = _conjugate_symmetric_extension(R, T, e_rr, e_rt, e_tt)
    return L.E, B


def max_type_reconstruct(E, B):
    return dr.b_transform(dr.make_dirac(E, np.zeros((E.rank, E.rank))), B)


def is_cr_type(L):
    """True iff Δ = 0 at the point."""
    return dr.invariants(L).rank_delta == 0


@dataclass(frozen=True)
class TetraCoord:
    r: int
    s: int
    k: int
    m: int
    hat_order: int

    def admissibility_error(self):
        return dr.admissibility_error(self.m, self.r, self.s, self.k)


def tetra_point(m, r, s, k):
    """Validated TetraCoord for a bare triple."""
    err = dr.admissibility_error(m, r, s, k)
    if err:
        raise InvalidStructure(err)
    return TetraCoord(r, s, k, m, s + 2 * k)


def tetra_coords(L):
    rec = dr.invariants(L)
    coord = tetra_point(rec.m, rec.r, rec.s, rec.k)
    hat_c = dr.complexify_real_dirac(hat(L))
    direct = dr.invariants(hat_c).s
    if direct != coord.hat_order:
        raise InvalidStructure(f"order of hat(L)_C is {direct}, expected s + 2k = {coord.hat_order}")
    return coord


def annihilator(D):
    """Ann D ⊂ V* as a real subspace of V ⊕ V*."""
    m = D.ambient_dim
    comp = ss.orthogonal_complement(D).basis
    return RealSubspace(2 * m, np.vstack([np.zeros((m, comp.shape[1])), comp]), D.tol)


def leaf_restriction(L, D):
    """L' = {X + ξ|_D : X + ξ ∈ L} in the coordinates of the stored basis of D."""
    tol = L.tol
    K = dr.k_space(L)
    ann = annihilator(D)
    g = ss.gap(K, ann)
    if g > CHECK_FACTOR * tol:
        raise KMismatch(f"K(L) differs from Ann D (gap {g:.2e})")
    rd = D.basis
    coords = np.vstack([rd.T @ L.vector_part, rd.T @ L.covector_part])
    if D.rank == 0:
        return dr.point_space()
    out = ss.column_span(coords, tol, scale=1.0)
    return dr.DiracPoint.from_space(out, tol)


@dataclass(frozen=True, eq=False)
class SplittingReport:
    structure: dr.DiracPoint = field(repr=False)
    invariants: tuple
    factor_invariants: tuple
    presymplectic_invariants: tuple
    recovery_gap: float
    image_gap: float
    presymplectic_gap: float
    kernel_rank: int
    factor_is_cr_type: bool
    tol: float

    @property
    def additive(self):
        return tuple(a + b for a, b in zip(self.factor_invariants, self.presymplectic_invariants)) == self.invariants

    @property
    def factor_has_order_index(self):
        r, s, _ = self.invariants
        fr, fs, _ = self.factor_invariants
        return fr == fs == s

    @property
    def kernel_matches(self):
        r, s, _ = self.invariants
        return self.kernel_rank == r - s

    @property
    def ok(self):
        gaps = max(self.recovery_gap, self.image_gap, self.presymplectic_gap)
        return (
            gaps < self.tol
            and self.additive
            and self.factor_has_order_index
            and self.kernel_matches
            and self.factor_is_cr_type
        )


def splitting_verify(L_cr, omega, B, tol=None):
    """Check the splitting conclusion L ≅ e^B(ι^!L × L_{iω}) on a synthesized L.

    L = e^B(L_cr × L_{iω}) is built, then pulled back along the inclusions of
    both factors.  The first pullback must be e^{ι*B} L_cr, of CR type with
    real index and order both equal to order(L).
    """
    tol = L_cr.tol if tol is None else tol
    omega = np.asarray(omega, dtype=float)
    B = np.asarray(B, dtype=float)
    m1, m2 = L_cr.dim_v, omega.shape[0]
    m = m1 + m2
    L_w = dr.from_presymplectic(omega, tol)
    L = dr.b_transform(dr.product(L_cr, L_w), B)
    inc1 = np.vstack([np.eye(m1), np.zeros((m2, m1))])
    inc2 = np.vstack([np.zeros((m1, m2)), np.eye(m2)])
    untwisted = dr.b_transform(L, -B)
    f1 = dr.backward_image(untwisted, inc1)
    f2 = dr.backward_image(untwisted, inc2)
    img1 = dr.backward_image(L, inc1)
    expected1 = dr.b_transform(L_cr, B[:m1, :m1])
    rec = dr.invariants(L)
    rec1 = dr.invariants(img1)
    rec2 = dr.invariants(f2)
    if m2:
        _, sv, _ = np.linalg.svd(omega)
        kr = m2 - ss.numerical_rank(sv, tol, max(1.0, sv[0]))[0]
    else:
        kr = 0
    return SplittingReport(
        structure=L,
        invariants=rec.triple,
        factor_invariants=rec1.triple,
        presymplectic_invariants=rec2.triple,
        recovery_gap=ss.gap(f1.space, L_cr.space),
        image_gap=ss.gap(img1.space, expected1.space),
        presymplectic_gap=ss.gap(f2.space, L_w.space),
        kernel_rank=kr,
        factor_is_cr_type=rec1.rank_delta == 0,
        tol=tol if tol > 1e-8 else 1e-8,
    )
