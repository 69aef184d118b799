"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import subprocess
import sys
import time

import numpy as np
from dsl_oracle import XYZ, max_relative_error

from cdirac import catalog
from cdirac import classify as cl
from cdirac import dirac as dr
from cdirac import exprdsl as ex
from cdirac import field as fd
from cdirac import subspace as ss
from cdirac import verify as vf


def report(num, title, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} #{num:02d} {title}: {detail}")
    return ok


def all_passed(counts):
    return all(p == t for p, t in counts.values())


def failures(counts):
    return {k: f"{p}/{t}" for k, (p, t) in counts.items() if p != t}


def cotangent(m):
    return ss.RealSubspace(2 * m, np.vstack([np.zeros((m, m)), np.eye(m)]))


def test_01_worked_example_grid():
    spec = catalog.get("jump_r3").spec()
    box = np.array([[-1.0] * 3, [1.0] * 3])
    start = time.perf_counter()
    rep = fd.analyze_grid(spec, box, 9, workers=1)
    elapsed = time.perf_counter() - start
    bad = []
    for p in rep.points:
        on_plane = p.point[1] == 0.0
        want = ((1, 1, 0), 2) if on_plane else ((1, 0, 1), 1)
        if p.error or (p.triple, p.rank_delta) != want:
            bad.append(p.index)
    real_index = {p.triple[0] for p in rep.points if p.triple}
    ok = not bad and real_index == {1} and rep.size == 729 and elapsed < 5.0
    detail = f"{rep.size} points, {len(bad)} mismatches, real index values {sorted(real_index)}, {elapsed:.2f} s"
    assert report(1, "worked example on 9^3 grid", ok, detail)


def test_02_worked_example_k_frame():
    spec = catalog.get("jump_r3").spec()
    rng = np.random.default_rng(2)
    gaps = [fd.k_field_check(spec, p, catalog.jump_k_frame(p)) for p in rng.uniform(-1, 1, (100, 3))]
    worst = max(gaps)
    assert report(2, "K = R(f(y) d/dx + e^y dz)", worst < 1e-8, f"max gap {worst:.2e} over 100 points")


def test_03_identity_suite():
    counts = vf.suite_identities(1000, [2, 4, 6, 8])
    ok = all_passed(counts)
    total = sum(t for _, t in counts.values())
    assert report(3, "pointwise identities, m in {2,4,6,8}", ok, f"{total} checks, failures {failures(counts)}")


def test_04_product_additivity():
    rng = np.random.default_rng(4)
    bad = 0
    for _ in range(500):
        m1, m2 = (int(x) for x in rng.integers(1, 6, 2))
        a, _ = vf.sample(m1, rng)
        b, _ = vf.sample(m2, rng)
        ra, rb = dr.invariants(a), dr.invariants(b)
        rc = dr.invariants(dr.product(a, b))
        if rc.triple != tuple(x + y for x, y in zip(ra.triple, rb.triple)):
            bad += 1
    assert report(4, "r, s, k additive under products", bad == 0, f"{bad}/500 pairs non-additive")


def test_05_hat_at_linear_level():
    rng = np.random.default_rng(5)
    formula, presym, cr, cplx = 0.0, 0.0, 0.0, 0.0
    for m in range(1, 9):
        for _ in range(50):
            L, _ = vf.sample(m, rng)
            formula = max(formula, ss.gap(cl.hat(L), cl.hat_from_invariants(L)))
            omega = dr.random_skew(m, rng)
            presym = max(presym, ss.gap(cl.hat(dr.from_presymplectic(omega)), dr.presymplectic_graph(omega)))
            if m >= 2:
                t10 = vf._random_cr(m, int(rng.integers(1, m // 2 + 1)), rng)
                cr = max(cr, ss.gap(cl.hat(dr.from_cr(t10)), cotangent(m)))
            d = int(rng.integers(0, m + 1))
            E = ss.column_span(rng.standard_normal((m, d)), real=True)
            lr = dr.real_graph(E, dr.random_skew(E.rank, rng))
            cplx = max(cplx, ss.gap(cl.hat(dr.complexify_real_dirac(lr)), lr))
    checks = {
        "hat(L) = L(Δ, ω_Δ)": formula < 1e-8,
        "hat(L_iω) = graph ω": presym < 1e-10,
        "hat(L_C) = L": cplx < 1e-10,
        "hat(L_(D,J)) = V*": cr < 1e-10,
    }
    detail = (
        f"gaps {formula:.1e} / {presym:.1e} / {cplx:.1e} / {cr:.1e}; "
        f"failed: {[k for k, v in checks.items() if not v] or 'none'}"
    )
    assert report(5, "hat at the linear level", all(checks.values()), detail)


def test_06_backward_image_real_index():
    rng = np.random.default_rng(6)
    hyper_bad = 0
    for _ in range(200):
        L = dr.random_lagrangian(4, int(rng.integers(2**32)), (0, 0, int(rng.integers(0, 3))))
        phi = vf.random_embedding(4, 3, rng)
        if dr.invariants(dr.backward_image(L, phi)).r != 1:
            hyper_bad += 1
    codim_bad = 0
    for _ in range(200):
        m = 2 * int(rng.integers(1, 5))
        L = dr.random_lagrangian(m, int(rng.integers(2**32)), (0, 0, int(rng.integers(0, m // 2 + 1))))
        c = int(rng.integers(1, m))
        if dr.invariants(dr.backward_image(L, vf.random_embedding(m, m - c, rng))).r > c:
            codim_bad += 1
    ok = hyper_bad == 0 and codim_bad == 0
    assert report(6, "pullbacks of real index 0", ok, f"hyperplane misses {hyper_bad}/200, codim misses {codim_bad}/200")


def test_07_hat_commutes_with_pullback():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        m = int(rng.integers(2, 8))
        L, _ = vf.sample(m, rng)
        phi = vf.random_embedding(m, m - int(rng.integers(1, m)), rng)
        worst = max(worst, ss.gap(dr.backward_image_real(cl.hat(L), phi), cl.hat(dr.backward_image(L, phi))))
    assert report(7, "hat commutes with pullback", worst < 1e-8, f"max gap {worst:.2e} over 200 samples")


def test_08_normal_form_roundtrip():
    worst, bad_dims, cells, n = 0.0, 0, 0, 0
    for m in range(1, 9):
        for cell in dr.admissible_cells(m):
            cells += 1
            r, s, k = cell
            for seed in range(100):
                L = dr.random_lagrangian(m, 1000 * cells + seed, cell)
                nf = cl.normal_form(L, check=False)
                n += 1
                worst = max(worst, nf.residual)
                kernel = nf.delta.rank - (np.linalg.matrix_rank(nf.omega_delta, tol=1e-7) if nf.delta.rank else 0)
                if nf.complement.rank != 2 * k + s or nf.t10.rank != k or kernel != r - s:
                    bad_dims += 1
    ok = worst < 1e-8 and bad_dims == 0
    detail = f"{cells} cells, {n} samples, max gap {worst:.2e}, block-dimension mismatches {bad_dims}"
    assert report(8, "normal form roundtrip over all cells", ok, detail)


def test_09_extremal_normalizations():
    rng = np.random.default_rng(9)
    t0, mx = 0.0, 0.0
    for _ in range(100):
        m = int(rng.integers(1, 9))
        r = m % 2 + 2 * int(rng.integers(0, m // 2 + 1))
        L = dr.random_lagrangian(m, int(rng.integers(2**32)), (r, int(rng.integers(0, r + 1)), 0))
        delta, omega, B = cl.type0_normal_form(L)
        t0 = max(t0, ss.gap(cl.type0_reconstruct(delta, omega, B).space, L.space))
    for _ in range(100):
        m = int(rng.integers(1, 9))
        r = m % 2 + 2 * int(rng.integers(0, m // 2 + 1))
        L = dr.random_lagrangian(m, int(rng.integers(2**32)), (r, int(rng.integers(0, r + 1)), (m - r) // 2))
        E, B = cl.max_type_normal_form(L)
        mx = max(mx, ss.gap(cl.max_type_reconstruct(E, B).space, L.space))
    ok = t0 < 1e-8 and mx < 1e-8
    assert report(9, "type-zero and maximal-type forms", ok, f"max gaps {t0:.2e} / {mx:.2e} over 100 each")


def test_10_splitting_conclusion():
    counts = vf.suite_splitting(100, [3, 4, 5, 6])
    keys = ("factor recovered (gap < 1e-8)", "factor has (r, s) = (s, s)")
    ok = all(counts[k][0] == counts[k][1] for k in keys)
    detail = ", ".join(f"{k}: {counts[k][0]}/{counts[k][1]}" for k in keys)
    assert report(10, "CR-type factor of synthetic splittings", ok, detail)


def test_11_involutivity_oracle():
    worst, lowest = 0.0, np.inf
    for name in catalog.names():
        entry = catalog.get(name)
        rep = fd.analyze_grid(entry.spec(), resolution=5, h=1e-5)
        vals = [p.involutivity_residual for p in rep.points if p.involutivity_residual is not None]
        if entry.involutive:
            worst = max(worst, max(vals))
        else:
            lowest = min(lowest, min(vals))
    ok = worst < 1e-6 and lowest >= 0.1
    detail = f"max over involutive examples {worst:.2e}, min over counterexample {lowest:.3f}"
    assert report(11, "finite-difference involutivity", ok, detail)


def test_12_expression_language():
    worst = max_relative_error(1000, 12)
    golden = [("i*(w)", 3), ("2x", 1), ("x +", 3), ("x + é", 4), ("x + w", 5), ("sin(x", 5)]
    wrong = []
    for text, pos in golden:
        try:
            ex.parse(text, XYZ)
            wrong.append(text)
        except (ex.ExprSyntaxError, ex.UnknownIdentifier) as exc:
            if exc.position != pos:
                wrong.append(text)
    ok = worst < 1e-12 and not wrong
    assert report(12, "expression language", ok, f"max rel error {worst:.1e}; position mismatches {wrong or 'none'}")


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "cdirac", *args], capture_output=True, check=False).stdout


def test_13_determinism():
    analyze = ("analyze", "--example", "jump_r3", "--res", "5")
    verify = ("verify", "--seeds", "5", "--dims", "2,3,4")
    a1, a2 = _cli(*analyze), _cli(*analyze)
    v1, v2 = _cli(*verify), _cli(*verify)
    ok = a1 == a2 and v1 == v2 and len(a1) > 0 and len(v1) > 0
    detail = f"analyze {len(a1)} bytes {'equal' if a1 == a2 else 'differ'}, verify {len(v1)} bytes {'equal' if v1 == v2 else 'differ'}"
    assert report(13, "byte-identical reports", ok, detail)
