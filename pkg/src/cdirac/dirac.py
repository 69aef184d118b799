"""Pointwise complex Dirac structures.

A complex Dirac structure at a point is a lagrangian subspace L of
C^{2m} = (V ⊕ V*) ⊗ C, stored with vector coordinates first and covector
coordinates second.  Two-forms are m×m skew matrices B with
B(X, Y) = Xᵀ B Y, so the contraction ι_X B is the covector Bᵀ X.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import subspace as ss
from .errors import (
    DimensionMismatch,
    InadmissibleProfile,
    InvalidStructure,
    NonTransversal,
    NotLagrangian,
    NotSkew,
)
from .subspace import CHECK_FACTOR, DEFAULT_TOL, ComplexSubspace, RealSubspace


def contract(form, x):
    """ι_X form, as covector coordinates."""
    return np.asarray(form).T @ x


def _check_skew(form, tol, name="form"):
    form = np.asarray(form)
    if form.ndim != 2 or form.shape[0] != form.shape[1]:
        raise DimensionMismatch(f"{name} must be a square matrix, got shape {form.shape}")
    scale = max(1.0, float(np.max(np.abs(form), initial=0.0)))
    if np.max(np.abs(form + form.T), initial=0.0) > CHECK_FACTOR * tol * scale:
        raise NotSkew(f"{name} is not skew-symmetric")
    return 0.5 * (form - form.T)


@dataclass(frozen=True, eq=False)
class DiracPoint:
    """A lagrangian subspace of (V ⊕ V*)_C together with its graph data (E, ε).

    ``E`` is the range pr_V L and ``eps`` the skew form on E written in the
    stored orthonormal basis of E, so that L = {X + ξ : X ∈ E, ξ|_E = ι_X ε}.
    ``eps_residual`` is the skewness defect of ε before antisymmetrization.
    """

    dim_v: int
    space: ComplexSubspace
    E: ComplexSubspace = field(repr=False)
    eps: np.ndarray = field(repr=False)
    eps_residual: float = 0.0

    @classmethod
    def from_space(cls, space, tol=None):
        tol = space.tol if tol is None else tol
        if space.ambient_dim % 2:
            raise DimensionMismatch("a Dirac point lives in an even-dimensional ambient space")
        m = space.ambient_dim // 2
        if space.rank != m:
            raise NotLagrangian(f"subspace has dimension {space.rank}, expected {m}")
        iso = ss.isotropy_residual(space)
        if iso > CHECK_FACTOR * tol:
            raise NotLagrangian(f"subspace is not isotropic (residual {iso:.2e})")
        E, eps, resid = _range_and_form(space, m, tol)
        return cls(m, space, E, eps, resid)

    @classmethod
    def from_frame(cls, frame, tol=DEFAULT_TOL):
        """Build from a 2m×m (or wider) matrix whose columns span L."""
        frame = np.asarray(frame, dtype=complex)
        return cls.from_space(ss.column_span(frame, tol), tol)

    @property
    def tol(self):
        return self.space.tol

    @property
    def basis(self):
        return self.space.basis

    @property
    def vector_part(self):
        return self.space.basis[: self.dim_v]

    @property
    def covector_part(self):
        return self.space.basis[self.dim_v :]

    def conjugate(self):
        return DiracPoint.from_space(ss.conjugate(self.space))

    def isotropy_residual(self):
        return ss.isotropy_residual(self.space)

    def __repr__(self):
        return f"DiracPoint(dim_v={self.dim_v})"


def _range_and_form(space, m, tol):
    """Extract (E, ε) from a lagrangian basis by least squares on E's basis."""
    if m == 0:
        return ss.zero(0, tol=tol), np.zeros((0, 0), complex), 0.0
    x = space.basis[:m]
    xi = space.basis[m:]
    E = ss.column_span(x, tol, scale=1.0)
    e = E.rank
    if e == 0:
        return E, np.zeros((0, 0), complex), 0.0
    q = E.basis
    coeff = q.conj().T @ x
    w = np.linalg.pinv(coeff)
    eps = (xi @ w).T @ q
    resid = float(np.max(np.abs(eps + eps.T)))
    return E, 0.5 * (eps - eps.T), resid


def form_on(E, form):
    """Restriction of an m×m bilinear form to the stored basis of E."""
    q = E.basis
    return q.T @ np.asarray(form) @ q


def make_dirac(E, eps, tol=None):
    """L(E, ε), with each ι_X ε extended by zero on the orthogonal complement of E."""
    tol = E.tol if tol is None else tol
    m = E.ambient_dim
    e = E.rank
    eps = np.asarray(eps, dtype=complex).reshape(e, e)
    eps = _check_skew(eps, tol, "eps")
    q = E.basis
    graph = np.vstack([q, q.conj() @ eps.T])
    ann = ss.orthogonal_complement(E).basis.conj()
    ann = np.vstack([np.zeros((m, m - e), complex), ann])
    return DiracPoint.from_frame(np.hstack([graph, ann]), tol)


def graph_of_form(E, form, tol=None):
    """L(E, form|_E) for a form given on all of V."""
    return make_dirac(E, form_on(E, form), tol)


def from_presymplectic(omega, tol=DEFAULT_TOL):
    """L_{iω} = {X + i ι_X ω}."""
    omega = _check_skew(np.asarray(omega, dtype=float), tol, "omega")
    m = omega.shape[0]
    if m == 0:
        return point_space()
    return make_dirac(ss.full(m, tol=tol), 1j * omega, tol)


def from_complex_structure(J, tol=DEFAULT_TOL):
    """L_J = T_{0,1} ⊕ T*_{1,0} for a linear complex structure J."""
    J = np.asarray(J, dtype=float)
    m = J.shape[0]
    if np.max(np.abs(J @ J + np.eye(m)), initial=0.0) > CHECK_FACTOR * tol * max(1.0, np.max(np.abs(J))) ** 2:
        raise InvalidStructure("J does not square to -I")
    t01, _ = ss.null_space(J + 1j * np.eye(m), tol)
    return make_dirac(ss.column_span(t01, tol), np.zeros((m // 2, m // 2)), tol)


def from_cr(t10, tol=None):
    """L_(D,J) = T_{1,0} ⊕ Ann T_{1,0}."""
    tol = t10.tol if tol is None else tol
    if ss.intersect(t10, ss.conjugate(t10)).rank:
        raise InvalidStructure("T10 meets its conjugate; not a CR structure")
    return make_dirac(t10, np.zeros((t10.rank, t10.rank)), tol)


def from_transverse_cr(E, tol=None):
    """L(E, 0) = E ⊕ Ann E for a transverse CR distribution E."""
    tol = E.tol if tol is None else tol
    real_part = ss.intersect(E, ss.conjugate(E))
    if ss.gap(real_part, ss.conjugate(real_part)) > CHECK_FACTOR * tol:
        raise InvalidStructure("E ∩ conj(E) is not conjugation stable")
    return make_dirac(E, np.zeros((E.rank, E.rank)), tol)


def presymplectic_graph(omega, tol=DEFAULT_TOL):
    """Real lagrangian L_ω = {X + ι_X ω} ⊂ V ⊕ V*."""
    omega = _check_skew(np.asarray(omega, dtype=float), tol, "omega")
    m = omega.shape[0]
    return ss.column_span(np.vstack([np.eye(m), omega.T]), tol, real=True)


def poisson_graph(pi, tol=DEFAULT_TOL):
    """Real lagrangian L_π = {π(α) + α} ⊂ V ⊕ V*."""
    pi = _check_skew(np.asarray(pi, dtype=float), tol, "pi")
    m = pi.shape[0]
    return ss.column_span(np.vstack([pi.T, np.eye(m)]), tol, real=True)


def real_graph(delta, omega, tol=DEFAULT_TOL):
    """Real lagrangian L(Δ, ω) for a real subspace Δ and a skew form on its basis."""
    m = delta.ambient_dim
    d = delta.rank
    omega = np.asarray(omega, dtype=float).reshape(d, d)
    r = delta.basis
    graph = np.vstack([r, r @ omega.T])
    ann = np.vstack([np.zeros((m, m - d)), ss.orthogonal_complement(delta).basis])
    return ss.column_span(np.hstack([graph, ann]), tol, real=True)


def complexify_real_dirac(lr, tol=None):
    """(L_r)_C for a real lagrangian subspace L_r of V ⊕ V*."""
    return DiracPoint.from_space(ss.complexify(lr), tol)


def from_poisson(pi, tol=DEFAULT_TOL):
    """Complexified graph of a Poisson bivector."""
    return complexify_real_dirac(poisson_graph(pi, tol), tol)


def b_transform(L, B, tol=None):
    """e^B L = {X + ξ + ι_X B : X + ξ ∈ L} for a (possibly complex) two-form B."""
    tol = L.tol if tol is None else tol
    B = _check_skew(np.asarray(B, dtype=complex), tol, "B")
    x = L.vector_part
    frame = np.vstack([x, L.covector_part + contract(B, x)])
    return DiracPoint.from_frame(frame, tol)


def transform(L, g, tol=None):
    """Push L forward by an invertible real linear map g: X + ξ ↦ gX + g^{-T}ξ."""
    tol = L.tol if tol is None else tol
    g = np.asarray(g, dtype=float)
    frame = np.vstack([g @ L.vector_part, np.linalg.solve(g.T, L.covector_part)])
    return DiracPoint.from_frame(frame, tol)


def product(L1, L2, tol=None):
    """L1 × L2 on V1 ⊕ V2 with coordinates ordered (v1, v2, ξ1, ξ2)."""
    tol = max(L1.tol, L2.tol) if tol is None else tol
    m1, m2 = L1.dim_v, L2.dim_v
    m = m1 + m2
    frame = np.zeros((2 * m, m), complex)
    frame[:m1, :m1] = L1.vector_part
    frame[m : m + m1, :m1] = L1.covector_part
    frame[m1:m, m1:] = L2.vector_part
    frame[m + m1 :, m1:] = L2.covector_part
    if m == 0:
        return L1
    return DiracPoint.from_space(ComplexSubspace(2 * m, frame, tol), tol)


def point_space():
    """The lagrangian of the zero vector space (unit for ``product``)."""
    return DiracPoint(0, ss.zero(0), ss.zero(0), np.zeros((0, 0), complex), 0.0)


def _finish_image(frame, n, tol, what):
    if n == 0:
        return point_space()
    out = ss.column_span(frame, tol)
    if out.rank != n:
        raise NonTransversal(f"{what} has dimension {out.rank}, expected {n}")
    iso = ss.isotropy_residual(out)
    if iso > CHECK_FACTOR * tol:
        raise NonTransversal(f"{what} is not isotropic (residual {iso:.2e})")
    return DiracPoint.from_space(out, tol)


def backward_image(L, phi, tol=None):
    """φ^! L = {X + φᵀξ : φX + ξ ∈ L} for a real linear map φ: V_N → V (m×n matrix)."""
    tol = L.tol if tol is None else tol
    phi = np.asarray(phi, dtype=float)
    m = L.dim_v
    if phi.shape[0] != m:
        raise DimensionMismatch(f"phi has {phi.shape[0]} rows, L lives over dimension {m}")
    n = phi.shape[1]
    null, _ = ss.null_space(np.hstack([phi.astype(complex), -L.vector_part]), tol)
    x, c = null[:n], null[n:]
    frame = np.vstack([x, phi.T @ (L.covector_part @ c)])
    return _finish_image(frame, n, tol, "backward image")


def forward_image(L, phi, tol=None):
    """φ_! L = {φX + ξ : X + φᵀξ ∈ L} for L over V_N and φ: V_N → V (m×n matrix)."""
    tol = L.tol if tol is None else tol
    phi = np.asarray(phi, dtype=float)
    n = L.dim_v
    if phi.shape[1] != n:
        raise DimensionMismatch(f"phi has {phi.shape[1]} columns, L lives over dimension {n}")
    m = phi.shape[0]
    null, _ = ss.null_space(np.hstack([L.covector_part, -phi.T.astype(complex)]), tol)
    c, xi = null[:n], null[n:]
    frame = np.vstack([phi @ (L.vector_part @ c), xi])
    return _finish_image(frame, m, tol, "forward image")


def backward_image_real(lr, phi, tol=DEFAULT_TOL):
    """φ^! of a real lagrangian subspace of V ⊕ V*."""
    phi = np.asarray(phi, dtype=float)
    m = lr.ambient_dim // 2
    n = phi.shape[1]
    null, _ = ss.null_space(np.hstack([phi, -lr.basis[:m]]), tol)
    frame = np.vstack([null[:n], phi.T @ (lr.basis[m:] @ null[n:])])
    return ss.column_span(frame, tol, real=True)


def is_transversal(L, phi, tol=None):
    """im φ + E = V (complexified), the sufficient condition for φ^! L to be smooth."""
    tol = L.tol if tol is None else tol
    im = ss.column_span(np.asarray(phi, dtype=complex), tol)
    return ss.sum_(im, L.E).rank == L.dim_v


@dataclass(frozen=True, eq=False)
class InvariantRecord:
    """Real index r, order s, type k and the associated distributions at a point.

    Δ₀ is computed twice: as the kernel of ω_Δ (``delta0``) and as the
    vector projection of K (``delta0_from_k``).
    """

    m: int
    r: int
    s: int
    k: int
    cork_e: int
    rank_delta: int
    rank_d: int
    rank_delta0: int
    omega_delta: np.ndarray = field(repr=False)
    k_basis: RealSubspace = field(repr=False)
    delta: RealSubspace = field(repr=False)
    d: RealSubspace = field(repr=False)
    delta0: RealSubspace = field(repr=False)
    delta0_from_k: RealSubspace = field(repr=False)
    marginal: bool = False

    @property
    def triple(self):
        return (self.r, self.s, self.k)

    @property
    def n(self):
        return (self.m - self.r) // 2

    def violations(self):
        """List of the structural identities that fail (empty when consistent)."""
        out = []
        m, r, s, k = self.m, self.r, self.s, self.k
        twice_n = m - r
        if (self.rank_d - self.rank_delta) % 2:
            out.append("rk D - rk Δ is odd")
        if k + s != self.cork_e:
            out.append("type + order != cork E")
        if r != s + self.rank_delta0:
            out.append("ri != order + rk Δ0")
        if self.rank_d != twice_n + r - s:
            out.append("rk D != 2n + r - s")
        if self.rank_delta != twice_n - 2 * k + r - s:
            out.append("rk Δ != 2(n-k) + r - s")
        if self.rank_delta0 != r - s:
            out.append("rk Δ0 != r - s")
        if twice_n % 2:
            out.append("dim M !≡ r mod 2")
        if not 0 <= s <= r:
            out.append("order not in [0, ri]")
        if not (0 <= k and 2 * k <= twice_n):
            out.append("type not in [0, (m - r)/2]")
        if self.k_basis.rank != r:
            out.append("rk K != ri")
        if self.delta0.rank != self.delta0_from_k.rank or (
            self.delta0.rank and ss.gap(self.delta0, self.delta0_from_k) > CHECK_FACTOR * self.delta0.tol
        ):
            out.append("ker ω_Δ != pr_V K")
        return out


def real_index(L):
    return ss.intersect(L.space, ss.conjugate(L.space)).rank


def k_space(L):
    """K = re(L ∩ L̄) as a real subspace of V ⊕ V*."""
    return ss.real_points(ss.intersect(L.space, ss.conjugate(L.space)))


def k_perp(L):
    """K^⊥ = re(L + L̄)."""
    return ss.real_points(ss.sum_(L.space, ss.conjugate(L.space)))


def form_on_real(L, delta):
    """ε evaluated on a real subspace Δ ⊆ E, written in Δ's basis."""
    if delta.rank == 0:
        return np.zeros((0, 0), complex)
    coeff = L.E.basis.conj().T @ delta.basis
    return coeff.T @ L.eps @ coeff


def invariants(L):
    """Compute the InvariantRecord of a DiracPoint."""
    tol = L.tol
    m = L.dim_v
    lcap = ss.intersect(L.space, ss.conjugate(L.space))
    K = ss.real_points(lcap)
    E = L.E
    ecap = ss.intersect(E, ss.conjugate(E))
    esum = ss.sum_(E, ss.conjugate(E))
    delta = ss.real_points(ecap)
    D = ss.real_points(esum)
    eps_delta = form_on_real(L, delta)
    omega = eps_delta.imag
    omega = 0.5 * (omega - omega.T)
    kernel_marginal = False
    if delta.rank:
        scale = max(1.0, float(np.linalg.norm(L.eps, 2)) if L.eps.size else 1.0)
        null, kernel_marginal = ss.null_space(omega, tol, scale=scale)
        delta0 = ss.column_span(delta.basis @ null.real, tol, real=True, scale=1.0)
    else:
        delta0 = ss.zero(m, real=True, tol=tol)
    if K.rank:
        delta0_k = ss.column_span(K.basis[:m], tol, real=True, scale=1.0)
    else:
        delta0_k = ss.zero(m, real=True, tol=tol)
    rank_d = D.rank
    rank_delta = delta.rank
    s = m - rank_d
    k = (rank_d - rank_delta) // 2
    marginal = any(x.marginal for x in (lcap, K, E, ecap, esum, delta, D, delta0, delta0_k)) or kernel_marginal
    return InvariantRecord(
        m=m,
        r=lcap.rank,
        s=s,
        k=k,
        cork_e=m - E.rank,
        rank_delta=rank_delta,
        rank_d=rank_d,
        rank_delta0=delta0.rank,
        omega_delta=omega,
        k_basis=K,
        delta=delta,
        d=D,
        delta0=delta0,
        delta0_from_k=delta0_k,
        marginal=marginal,
    )


@dataclass(frozen=True, eq=False)
class ReducedGC:
    """The linear generalized complex structure induced on K^⊥/K.

    Quotient coordinates are (a, b) where a are coefficients along
    ``vector_frame`` (an orthonormal complement of Δ₀ in D) and b the values
    of the covector part on the same frame, after the K-splitting correction
    ``b1`` has been applied to L.
    """

    point: DiracPoint
    vector_frame: np.ndarray
    b1: np.ndarray


def quotient_data(L):
    from .classify import split_k_correction

    tol = L.tol
    m = L.dim_v
    rec = invariants(L)
    if rec.r == 0:
        return ReducedGC(L, np.eye(m), np.zeros((m, m)))
    b1 = split_k_correction(L)
    L1 = b_transform(L, -b1)
    # D ⊖ Δ₀, Euclidean complement inside D
    d = rec.d.basis
    if rec.delta0.rank:
        inside = d.T @ rec.delta0.basis
        u, _, _ = np.linalg.svd(inside, full_matrices=True)
        frame = d @ u[:, rec.delta0.rank :]
    else:
        frame = d
    q = frame.shape[1]
    if q == 0:
        return ReducedGC(point_space(), frame, b1)
    coords = np.vstack([frame.T @ L1.vector_part, frame.T @ L1.covector_part])
    span_ = ss.column_span(coords, tol, scale=1.0)
    if span_.rank != q:
        raise NotLagrangian(f"quotient structure has dimension {span_.rank}, expected {q}")
    return ReducedGC(DiracPoint.from_space(span_, tol), frame, b1)


def reduced_gc(L):
    """L₀ = (L + L∩L̄)/(L∩L̄) in coordinates of K^⊥/K ≅ D/Δ₀ ⊕ (D/Δ₀)*."""
    return quotient_data(L).point


def gc_operator(L):
    """Real matrix 𝒥 on V ⊕ V* with +i eigenspace L (requires L ∩ L̄ = 0)."""
    basis = np.hstack([L.basis, L.basis.conj()])
    m = L.dim_v
    if np.linalg.matrix_rank(basis, tol=L.tol) != 2 * m:
        raise InvalidStructure("L meets its conjugate; no generalized complex operator")
    diag = np.concatenate([np.full(m, 1j), np.full(m, -1j)])
    J = basis @ np.diag(diag) @ np.linalg.inv(basis)
    return J.real


# -- random generation --------------------------------------------------------


def admissibility_error(m, r, s, k):
    """Name the violated constraint for (r, s, k) in dimension m, or return None."""
    if m < 0:
        return "dimension must be nonnegative"
    if not 0 <= r <= m:
        return "real index must lie in [0, dim M]"
    if (m - r) % 2:
        return "parity violated: dim M ≡ r mod 2"
    if s < 0:
        return "order must be nonnegative"
    if s > r:
        return "order ≤ real index violated"
    if k < 0 or 2 * k > m - r:
        return "type must lie in [0, (dim M - r)/2]"
    return None


def admissible_cells(m):
    return [
        (r, s, k)
        for r in range(m % 2, m + 1, 2)
        for s in range(r + 1)
        for k in range((m - r) // 2 + 1)
    ]


def cell_model(m, r, s, k, tol=DEFAULT_TOL):
    """Canonical L_{iω_Δ} × L_(C,J) of invariants (r, s, k) on R^m.

    Returns ``(L, delta_dim)``; Δ is spanned by the first ``delta_dim``
    coordinates, ω_Δ is standard symplectic on its first 2(n-k) coordinates
    and zero on the remaining r - s, and the CR block occupies the next 2k
    coordinates.
    """
    err = admissibility_error(m, r, s, k)
    if err:
        raise InadmissibleProfile(f"(r, s, k) = ({r}, {s}, {k}) in dimension {m}: {err}")
    n = (m - r) // 2
    sym = 2 * (n - k)
    delta_dim = sym + r - s
    omega = np.zeros((m, m))
    for j in range(0, sym, 2):
        omega[j, j + 1] = 1.0
        omega[j + 1, j] = -1.0
    cols = [np.eye(m)[:, j].astype(complex) for j in range(delta_dim)]
    for j in range(k):
        t = np.zeros(m, complex)
        t[delta_dim + 2 * j] = 1.0
        t[delta_dim + 2 * j + 1] = -1j
        cols.append(t / np.sqrt(2))
    E = ss.span(cols, m, tol) if cols else ss.zero(m, tol=tol)
    return graph_of_form(E, 1j * omega, tol), delta_dim


def random_orthogonal(m, rng):
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    return q * np.sign(np.diag(r))


def random_skew(m, rng, scale=1.0):
    a = rng.uniform(-scale, scale, (m, m))
    return np.triu(a, 1) - np.triu(a, 1).T


def random_gl(m, rng):
    """Random well-conditioned real linear map (condition number ≤ e)."""
    if m == 0:
        return np.zeros((0, 0))
    scales = np.exp(rng.uniform(-0.5, 0.5, m))
    return random_orthogonal(m, rng) @ np.diag(scales) @ random_orthogonal(m, rng)


def random_lagrangian(m, seed, profile="any", tol=DEFAULT_TOL):
    """Seeded random DiracPoint.

    ``profile`` is an admissible (r, s, k) triple or ``"any"``.  Triples are
    realized as e^{B}(cell model) pushed by a random linear change of
    coordinates, where B has a random real part and an imaginary part that
    vanishes on Δ×Δ.  ``"any"`` draws E of random dimension and a random
    complex skew ε.
    """
    rng = np.random.default_rng(seed)
    if isinstance(profile, str):
        if profile != "any":
            raise InadmissibleProfile(f"unknown profile {profile!r}")
        e = int(rng.integers(0, m + 1))
        raw = rng.standard_normal((m, e)) + 1j * rng.standard_normal((m, e))
        E = ss.column_span(raw, tol) if e else ss.zero(m, tol=tol)
        eps = random_skew(E.rank, rng) + 1j * random_skew(E.rank, rng)
        return make_dirac(E, eps, tol)
    r, s, k = profile
    model, delta_dim = cell_model(m, r, s, k, tol)
    b_real = random_skew(m, rng)
    b_imag = random_skew(m, rng)
    b_imag[:delta_dim, :delta_dim] = 0.0
    L = b_transform(model, b_real + 1j * b_imag, tol)
    return transform(L, random_gl(m, rng), tol)


def random_profile(m, rng):
    """Uniformly chosen admissible cell for dimension m."""
    cells = admissible_cells(m)
    return cells[int(rng.integers(len(cells)))]
