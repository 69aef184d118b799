"""Seeded property suites over random linear complex Dirac structures.

Each suite returns an ordered mapping property -> [passed, total]; results
depend only on the seeds and dimensions.
"""

from __future__ import annotations

import numpy as np

from . import classify as cl
from . import dirac as dr
from . import subspace as ss
from .errors import CDiracError

GAP_TOL = 1e-8
SUITES = ("identities", "hat", "normalform", "products", "images", "splitting")
_SUITE_IDS = {name: j for j, name in enumerate(SUITES)}


def rng_for(suite, m, i):
    return np.random.default_rng([_SUITE_IDS[suite], m, i])


def sample(m, rng, tol=ss.DEFAULT_TOL):
    """Random DiracPoint: half the time from a random admissible cell, else unstructured."""
    seed = int(rng.integers(2**32))
    if rng.random() < 0.5:
        cell = dr.random_profile(m, rng)
        return dr.random_lagrangian(m, seed, cell, tol), cell
    return dr.random_lagrangian(m, seed, "any", tol), None


class _Tally:
    def __init__(self):
        self.counts = {}

    def check(self, name, ok):
        c = self.counts.setdefault(name, [0, 0])
        c[1] += 1
        if ok:
            c[0] += 1

    def run(self, name, fn):
        try:
            ok = bool(fn())
        except CDiracError:
            ok = False
        self.check(name, ok)


def suite_identities(seeds, dims):
    t = _Tally()
    for m in dims:
        for i in range(seeds):
            L, cell = sample(m, rng_for("identities", m, i))
            rec = dr.invariants(L)
            n2 = m - rec.r
            t.check("type + order = cork E", rec.k + rec.s == rec.cork_e)
            t.check("ri = order + rk Δ0", rec.r == rec.s + rec.rank_delta0)
            t.check("rk D = 2n + r - s", rec.rank_d == n2 + rec.r - rec.s)
            t.check("rk Δ = 2(n - k) + r - s", rec.rank_delta == n2 - 2 * rec.k + rec.r - rec.s)
            t.check("dim M ≡ r mod 2", n2 % 2 == 0)
            t.check("0 ≤ s ≤ r", 0 <= rec.s <= rec.r)
            t.check("ker ω_Δ = pr_V K", "ker ω_Δ != pr_V K" not in rec.violations())
            if cell is not None:
                t.check("profile reproduced", rec.triple == tuple(cell))
    return t.counts


def suite_hat(seeds, dims):
    t = _Tally()
    for m in dims:
        for i in range(seeds):
            rng = rng_for("hat", m, i)
            L, _ = sample(m, rng)
            h = cl.hat(L)
            t.run("hat(L) = L(Δ, ω_Δ)", lambda: ss.gap(h, cl.hat_from_invariants(L)) < GAP_TOL)
            B = dr.random_skew(m, rng)
            t.run("hat(e^B L) = hat(L), B real", lambda: ss.gap(cl.hat(dr.b_transform(L, B)), h) < GAP_TOL)
            C = dr.random_skew(m, rng)
            t.run(
                "hat(e^{iC} L) = e^C hat(L)",
                lambda: ss.gap(cl.hat(dr.b_transform(L, 1j * C)), _real_b(h, C)) < GAP_TOL,
            )
            rec = dr.invariants(L)
            t.run("order of hat(L)_C = s + 2k", lambda: dr.invariants(dr.complexify_real_dirac(h)).s == rec.s + 2 * rec.k)
            omega = dr.random_skew(m, rng)
            t.run(
                "hat(L_{iω}) = graph(ω)",
                lambda: ss.gap(cl.hat(dr.from_presymplectic(omega)), dr.presymplectic_graph(omega)) < GAP_TOL,
            )
            if m >= 2:
                k = int(rng.integers(1, m // 2 + 1))
                t10 = _random_cr(m, k, rng)
                t.run("hat(L_(D,J)) = V*", lambda: ss.gap(cl.hat(dr.from_cr(t10)), _cotangent(m)) < GAP_TOL)
    return t.counts


def _real_b(lr, B):
    m = lr.ambient_dim // 2
    x = lr.basis[:m]
    return ss.column_span(np.vstack([x, lr.basis[m:] + B.T @ x]), lr.tol, real=True)


def _cotangent(m):
    return ss.RealSubspace(2 * m, np.vstack([np.zeros((m, m)), np.eye(m)]))


def _random_cr(m, k, rng):
    """T10 = span of random (a_j - i J a_j) in a random 2k-plane."""
    g = dr.random_gl(m, rng)
    cols = [(g[:, 2 * j] - 1j * g[:, 2 * j + 1]) for j in range(k)]
    return ss.span(cols, m)


def suite_normalform(seeds, dims):
    t = _Tally()
    for m in dims:
        for i in range(seeds):
            rng = rng_for("normalform", m, i)
            L, _ = sample(m, rng)
            rec = dr.invariants(L)
            try:
                nf = cl.normal_form(L)
            except CDiracError:
                t.check("roundtrip gap < 1e-8", False)
                continue
            t.check("roundtrip gap < 1e-8", nf.residual < GAP_TOL)
            t.check("CR block has dimension 2k + s", nf.complement.rank == 2 * rec.k + rec.s)
            t.check("T10 has dimension k", nf.t10.rank == rec.k)
            kernel = nf.delta.rank - np.linalg.matrix_rank(nf.omega_delta, tol=1e-7) if nf.delta.rank else 0
            t.check("ker ω_Δ has dimension r - s", kernel == rec.r - rec.s)
            t.check("B is real and skew", np.allclose(nf.B, -nf.B.T, atol=1e-12))
            red = dr.reduced_gc(L)
            t.check("reduced structure has real index 0", red.dim_v == 0 or dr.invariants(red).r == 0)
            if rec.k == 0:
                t.run("type-zero normalization", lambda: _type0_gap(L) < GAP_TOL)
            if 2 * rec.k == m - rec.r:
                t.run("maximal-type normalization", lambda: _maxtype_gap(L) < GAP_TOL)
    return t.counts


def _type0_gap(L):
    delta, omega, B = cl.type0_normal_form(L)
    return ss.gap(cl.type0_reconstruct(delta, omega, B).space, L.space)


def _maxtype_gap(L):
    E, B = cl.max_type_normal_form(L)
    return ss.gap(cl.max_type_reconstruct(E, B).space, L.space)


def suite_products(seeds, dims):
    t = _Tally()
    for m in dims:
        for i in range(seeds):
            rng = rng_for("products", m, i)
            m1 = int(rng.integers(1, m)) if m > 1 else 1
            m2 = max(m - m1, 1)
            L1, _ = sample(m1, rng)
            L2, _ = sample(m2, rng)
            a, b = dr.invariants(L1), dr.invariants(L2)
            c = dr.invariants(dr.product(L1, L2))
            t.check("real index additive", c.r == a.r + b.r)
            t.check("order additive", c.s == a.s + b.s)
            t.check("type additive", c.k == a.k + b.k)
    return t.counts


def random_embedding(m, n, rng):
    """Orthonormal m×n matrix: a random n-dimensional subspace of R^m."""
    return dr.random_orthogonal(m, rng)[:, :n]


def suite_images(seeds, dims):
    t = _Tally()
    for m in dims:
        if m < 2:
            continue
        for i in range(seeds):
            rng = rng_for("images", m, i)
            k = int(rng.integers(0, m // 2 + 1))
            if m % 2:
                L, _ = sample(m, rng)
            else:
                L = dr.random_lagrangian(m, int(rng.integers(2**32)), (0, 0, k))
            c = int(rng.integers(1, m))
            phi = random_embedding(m, m - c, rng)
            try:
                img = dr.backward_image(L, phi)
            except CDiracError:
                t.check("backward image is lagrangian", False)
                continue
            t.check("backward image is lagrangian", True)
            if m % 2 == 0:
                r = dr.invariants(img).r
                t.check("r = 0 pulls back to real index ≤ codim", r <= c)
                if c == 1:
                    t.check("r = 0 pulls back to real index 1 on hyperplanes", r == 1)
            t.run(
                "φ^!(hat L) = hat(φ^! L)",
                lambda: ss.gap(dr.backward_image_real(cl.hat(L), phi), cl.hat(img)) < GAP_TOL,
            )
            psi = random_embedding(m, m - c, rng)
            small, _ = sample(m - c, rng)
            t.run("forward image is lagrangian", lambda: dr.forward_image(small, psi).dim_v == m)
    return t.counts


def suite_splitting(seeds, dims):
    t = _Tally()
    for m in dims:
        if m < 2:
            continue
        for i in range(seeds):
            rng = rng_for("splitting", m, i)
            m2 = 2 * int(rng.integers(0, m // 2 + 1))
            m1 = m - m2
            if m1 == 0:
                m1, m2 = 2, m2 - 2
            s = m1 % 2 + 2 * int(rng.integers(0, m1 // 2 + 1))
            k = (m1 - s) // 2
            L_cr = dr.random_lagrangian(m1, int(rng.integers(2**32)), (s, s, k))
            rank = 2 * int(rng.integers(0, m2 // 2 + 1))
            omega = _random_presymplectic(m2, rank, rng)
            B = dr.random_skew(m, rng)
            rep = cl.splitting_verify(L_cr, omega, B)
            t.check("factor recovered (gap < 1e-8)", max(rep.recovery_gap, rep.image_gap) < GAP_TOL)
            t.check("factor has (r, s) = (s, s)", rep.factor_has_order_index)
            t.check("factor is CR type", rep.factor_is_cr_type)
            t.check("invariants additive", rep.additive)
            t.check("dim ker ω = r - s", rep.kernel_matches)
    return t.counts


def _random_presymplectic(m, rank, rng):
    """Skew m×m form of the given even rank in random coordinates."""
    om = np.zeros((m, m))
    for j in range(0, rank, 2):
        w = float(np.exp(rng.uniform(-0.5, 0.5)))
        om[j, j + 1], om[j + 1, j] = w, -w
    g = dr.random_gl(m, rng) if m else np.zeros((0, 0))
    return g.T @ om @ g


_RUNNERS = {
    "identities": suite_identities,
    "hat": suite_hat,
    "normalform": suite_normalform,
    "products": suite_products,
    "images": suite_images,
    "splitting": suite_splitting,
}


def run_suite(name, seeds, dims):
    return _RUNNERS[name](int(seeds), [int(d) for d in dims])


def run(suites, seeds, dims):
    """Ordered {suite: {property: [passed, total]}}."""
    names = SUITES if "all" in suites else suites
    return {name: run_suite(name, seeds, dims) for name in names}
