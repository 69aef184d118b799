"""Structure fields p ↦ L(p) given by frames of DSL expressions.

Grid evaluation, stratification by (r, s, k), rank-jump diagnostics and
finite-difference Dorfman-bracket involutivity checks.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import classify as cl
from . import dirac as dr
from . import exprdsl
from . import subspace as ss
from .errors import (
    CDiracError,
    DimensionMismatch,
    EvalError,
    FrameDegenerate,
    NotLagrangian,
    StencilOutOfDomain,
)
from .subspace import CHECK_FACTOR, DEFAULT_TOL

FD_STEP = 1e-5


class FrameExpressionError(CDiracError, ValueError):
    """A frame entry failed to parse; ``section`` and ``component`` locate it."""

    def __init__(self, section, component, cause):
        self.section = section
        self.component = component
        self.cause = cause
        super().__init__(f"frame section {section}, component {component}: {cause}")


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """A field of lagrangians given by m sections, each a list of 2m expressions.

    Component order in a section is (vector part, covector part) in the
    coordinate frame ∂_1..∂_m, dx_1..dx_m.
    """

    dim: int
    coords: tuple
    frame: tuple
    name: str = "field"
    box: np.ndarray | None = None
    tol: float = DEFAULT_TOL
    _compiled: tuple = field(default=(), init=False, repr=False)

    def __post_init__(self):
        m = int(self.dim)
        coords = tuple(self.coords)
        if m <= 0:
            raise DimensionMismatch("dim must be positive")
        if len(coords) != m:
            raise DimensionMismatch(f"{len(coords)} coordinates for dimension {m}")
        exprdsl.check_coords(list(coords))
        frame = tuple(tuple(str(t) for t in sec) for sec in self.frame)
        if len(frame) != m:
            raise DimensionMismatch(f"frame has {len(frame)} sections, expected {m}")
        for j, sec in enumerate(frame):
            if len(sec) != 2 * m:
                raise DimensionMismatch(f"section {j} has {len(sec)} components, expected {2 * m}")
        box = self.box
        if box is not None:
            box = np.array(box, dtype=float).reshape(2, m)
            if np.any(box[0] >= box[1]):
                raise ValueError("box lower bounds must be below upper bounds")
            box.setflags(write=False)
        object.__setattr__(self, "dim", m)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "_compiled", self._compile())

    def _compile(self):
        out = []
        for j, sec in enumerate(self.frame):
            row = []
            for c, text in enumerate(sec):
                try:
                    tree = exprdsl.parse(text, self.coords)
                except (exprdsl.ExprSyntaxError, exprdsl.UnknownIdentifier) as exc:
                    raise FrameExpressionError(j, c, exc) from exc
                row.append(exprdsl.compile_expr(tree, self.coords))
            out.append(tuple(row))
        return tuple(out)

    def __getstate__(self):
        state = dict(self.__dict__)
        state.pop("_compiled", None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        object.__setattr__(self, "_compiled", self._compile())

    @classmethod
    def from_vectors(cls, dim, coords, sections, **kw):
        """Build from sections given as (vector, covector) pairs of expression lists."""
        frame = [list(v) + list(c) for v, c in sections]
        return cls(dim, coords, frame, **kw)

    def section(self, j):
        """The j-th frame section as a callable p -> complex 2m-vector."""
        funcs = self._compiled[j]

        def sec(p):
            try:
                return np.array([f(p) for f in funcs], dtype=complex)
            except exprdsl.DomainError as exc:
                raise EvalError(str(exc)) from exc

        return sec

    def frame_matrix(self, p):
        """2m×m matrix whose columns are the raw sections at p."""
        p = _as_point(p, self.dim)
        try:
            cols = [[f(p) for f in funcs] for funcs in self._compiled]
        except exprdsl.DomainError as exc:
            raise EvalError(str(exc)) from exc
        return np.array(cols, dtype=complex).T


def _as_point(p, m):
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.shape != (m,):
        raise DimensionMismatch(f"point has {p.size} coordinates, expected {m}")
    return p


def eval_field(spec, p, tol=None):
    """DiracPoint spanned by the frame at p."""
    tol = spec.tol if tol is None else tol
    frame = spec.frame_matrix(p)
    span_ = ss.column_span(frame, tol)
    if span_.rank != spec.dim:
        raise FrameDegenerate(f"frame has rank {span_.rank} at {list(map(float, p))}, expected {spec.dim}")
    iso = ss.isotropy_residual(span_)
    if iso > CHECK_FACTOR * tol:
        raise NotLagrangian(f"frame is not isotropic at {list(map(float, p))} (residual {iso:.2e})")
    return dr.DiracPoint.from_space(span_, tol)


# -- Dorfman bracket ---------------------------------------------------------


def default_step(p):
    return FD_STEP * (1.0 + float(np.max(np.abs(p), initial=0.0)))


def _check_stencil(p, h, domain):
    if domain is None:
        return
    lo, hi = np.asarray(domain, dtype=float).reshape(2, -1)
    if np.any(p - h < lo) or np.any(p + h > hi):
        raise StencilOutOfDomain(f"stencil of step {h:g} around {list(map(float, p))} leaves the domain")


def jacobian_fd(sec, p, h):
    """J[a, b] = ∂_b S^a by central differences."""
    m = p.size
    cols = []
    for b in range(m):
        e = np.zeros(m)
        e[b] = h
        cols.append((sec(p + e) - sec(p - e)) / (2 * h))
    return np.array(cols).T


def _bracket(s1, j1, s2, j2, m):
    x, xi = s1[:m], s1[m:]
    y, eta = s2[:m], s2[m:]
    jx, jxi = j1[:m], j1[m:]
    jy, jeta = j2[:m], j2[m:]
    vec = jy @ x - jx @ y
    lie = jeta @ x + jx.T @ eta
    contraction = (jxi - jxi.T) @ y
    return np.concatenate([vec, lie - contraction])


def dorfman_bracket_fd(sec1, sec2, p, h=None, domain=None):
    """[X+ξ, Y+η] = [X,Y] + L_X η - ι_Y dξ at p by central differences."""
    p = np.asarray(p, dtype=float).reshape(-1)
    h = default_step(p) if h is None else float(h)
    if h <= 0:
        raise ValueError("step must be positive")
    _check_stencil(p, h, domain)
    m = p.size
    s1, s2 = np.asarray(sec1(p), complex), np.asarray(sec2(p), complex)
    if s1.shape != (2 * m,) or s2.shape != (2 * m,):
        raise DimensionMismatch(f"sections must return vectors of length {2 * m}")
    return _bracket(s1, jacobian_fd(sec1, p, h), s2, jacobian_fd(sec2, p, h), m)


def involutivity_residual(spec, p, h=None, domain=None, L=None):
    """max over frame pairs of dist([s_i, s_j], L(p)) / max(|[s_i, s_j]|, |s_i||s_j|)."""
    p = _as_point(p, spec.dim)
    h = default_step(p) if h is None else float(h)
    _check_stencil(p, h, domain)
    L = eval_field(spec, p) if L is None else L
    m = spec.dim
    secs = [spec.section(j) for j in range(m)]
    vals = [s(p) for s in secs]
    jacs = [jacobian_fd(s, p, h) for s in secs]
    worst = 0.0
    for i, j in itertools.combinations(range(m), 2):
        b = _bracket(vals[i], jacs[i], vals[j], jacs[j], m)
        denom = max(np.linalg.norm(b), np.linalg.norm(vals[i]) * np.linalg.norm(vals[j]))
        if denom == 0.0:
            continue
        worst = max(worst, ss.distance_to(L.space, b) / denom)
    return float(worst)


def k_field_check(spec, p, predicted, tol=None):
    """Gap between K(L(p)) and the real span of ``predicted`` (2m-vectors)."""
    L = eval_field(spec, p, tol)
    K = dr.k_space(L)
    m = spec.dim
    pred = np.asarray(predicted, dtype=float).reshape(-1, 2 * m).T
    target = ss.column_span(pred, L.tol, real=True) if pred.shape[1] else ss.zero(2 * m, real=True, tol=L.tol)
    return ss.gap(K, target)


# -- grid analysis -----------------------------------------------------------


@dataclass(frozen=True)
class PointResult:
    index: tuple
    point: tuple
    triple: tuple | None = None
    rank_delta: int | None = None
    lagrangian_residual: float | None = None
    involutivity_residual: float | None = None
    hat_gap: float | None = None
    marginal: bool = False
    error: str | None = None

    @property
    def classified(self):
        return self.error is None and not self.marginal


@dataclass(frozen=True)
class Stratum:
    count: int
    lower: tuple
    upper: tuple


@dataclass(frozen=True, eq=False)
class GridReport:
    name: str
    box: np.ndarray
    resolution: tuple
    h: float | None
    tol: float
    points: tuple
    strata: dict
    jump_set: tuple
    usc_violations: dict
    isolated_nongeneric: dict

    @property
    def failed(self):
        return tuple(p for p in self.points if p.error is not None)

    @property
    def marginal(self):
        return tuple(p for p in self.points if p.error is None and p.marginal)

    @property
    def size(self):
        return len(self.points)

    def max_involutivity(self):
        vals = [p.involutivity_residual for p in self.points if p.involutivity_residual is not None]
        return max(vals, default=0.0)

    def max_hat_gap(self):
        return max((p.hat_gap for p in self.points if p.hat_gap is not None), default=0.0)


def grid_axes(box, resolution):
    box = np.asarray(box, dtype=float).reshape(2, -1)
    m = box.shape[1]
    res = (int(resolution),) * m if np.isscalar(resolution) else tuple(int(r) for r in resolution)
    if len(res) != m:
        raise DimensionMismatch(f"{len(res)} resolutions for {m} axes")
    if any(r < 2 for r in res):
        raise ValueError("resolution must be at least 2 per axis")
    return [np.linspace(box[0, a], box[1, a], res[a]) for a in range(m)], res


def analyze_point(spec, index, p, h=None, box=None, tol=None):
    """Evaluate, classify and check one grid point; errors are captured in the result."""
    p = np.asarray(p, dtype=float)
    base = dict(index=tuple(index), point=tuple(float(x) for x in p))
    try:
        L = eval_field(spec, p, tol)
        rec = dr.invariants(L)
        bad = rec.violations()
        if bad:
            return PointResult(**base, error="identity violations: " + "; ".join(bad))
        hat_gap = ss.gap(cl.hat(L), cl.hat_from_invariants(L, rec))
        step = default_step(p) if h is None else h
        inv = None
        if box is None or (np.all(p - step >= box[0]) and np.all(p + step <= box[1])):
            inv = involutivity_residual(spec, p, step, box, L=L)
        return PointResult(
            **base,
            triple=rec.triple,
            rank_delta=rec.rank_delta,
            lagrangian_residual=L.isotropy_residual(),
            involutivity_residual=inv,
            hat_gap=hat_gap,
            marginal=bool(rec.marginal or L.space.marginal),
        )
    except CDiracError as exc:
        return PointResult(**base, error=f"{type(exc).__name__}: {exc}")


_WORKER_SPEC = None


def _init_worker(spec):
    global _WORKER_SPEC
    _WORKER_SPEC = spec


def _run_chunk(args):
    items, h, box, tol = args
    return [analyze_point(_WORKER_SPEC, idx, p, h, box, tol) for idx, p in items]


def analyze_grid(spec, box=None, resolution=9, h=None, tol=None, workers=1):
    """Classify every point of a uniform grid and collect diagnostics."""
    box = spec.box if box is None else np.asarray(box, dtype=float).reshape(2, spec.dim)
    if box is None:
        raise ValueError("no box given and the field declares none")
    tol = spec.tol if tol is None else tol
    axes, res = grid_axes(box, resolution)
    items = [(idx, np.array([axes[a][i] for a, i in enumerate(idx)])) for idx in np.ndindex(*res)]
    if workers and workers > 1:
        chunks = [items[i :: workers * 4] for i in range(workers * 4)]
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(spec,)) as pool:
            parts = pool.map(_run_chunk, [(c, h, box, tol) for c in chunks])
            results = [r for part in parts for r in part]
        results.sort(key=lambda r: r.index)
    else:
        results = [analyze_point(spec, idx, p, h, box, tol) for idx, p in items]
    return _assemble(spec, box, res, h, tol, results)


def _strata(results):
    groups = {}
    for r in results:
        if r.classified:
            groups.setdefault(r.triple, []).append(r.point)
    out = {}
    for triple in sorted(groups):
        pts = np.array(groups[triple])
        out[triple] = Stratum(len(pts), tuple(pts.min(axis=0)), tuple(pts.max(axis=0)))
    return out


def _neighbor_offsets(m):
    return [d for d in itertools.product((-1, 0, 1), repeat=m) if any(d)]


def _neighbors(idx, res, offsets):
    for d in offsets:
        q = tuple(i + o for i, o in zip(idx, d))
        if all(0 <= x < n for x, n in zip(q, res)):
            yield q


def _assemble(spec, box, res, h, tol, results):
    by_index = {r.index: r for r in results}
    offsets = _neighbor_offsets(len(res))
    ok = {r.index: r for r in results if r.classified}

    def values(key):
        return {i: key(r) for i, r in ok.items()}

    nbrs = {idx: [q for q in _neighbors(idx, res, offsets) if q in ok] for idx in ok}
    jumps = []
    for idx, r in ok.items():
        if any(ok[q].rank_delta < r.rank_delta for q in nbrs[idx]):
            jumps.append(idx)

    ri = values(lambda r: r.triple[0])
    order = values(lambda r: r.triple[1])
    typ = values(lambda r: r.triple[2])
    usc = {
        "real_index": _usc_violations(ri, nbrs),
        "order": _usc_violations(order, nbrs),
        "type": _usc_violations(typ, nbrs, same=order),
    }
    isolated = {
        "real_index": _isolated_nongeneric(ri, nbrs),
        "order": _isolated_nongeneric(order, nbrs),
    }
    return GridReport(
        name=spec.name,
        box=np.array(box),
        resolution=tuple(res),
        h=h,
        tol=tol,
        points=tuple(by_index[i] for i in sorted(by_index)),
        strata=_strata(results),
        jump_set=tuple(sorted(jumps)),
        usc_violations=usc,
        isolated_nongeneric=isolated,
    )


def _usc_violations(vals, nbrs, same=None):
    """Points strictly below every comparable neighbor (a downward spike breaks USC)."""
    out = []
    for idx, v in vals.items():
        nb = nbrs[idx]
        if same is not None:
            nb = [q for q in nb if same[q] == same[idx]]
        if nb and all(vals[q] > v for q in nb):
            out.append(idx)
    return tuple(sorted(out))


def _isolated_nongeneric(vals, nbrs):
    """Points above the generic (minimal) value whose neighbors are all generic."""
    if not vals:
        return ()
    generic = min(vals.values())
    out = []
    for idx, v in vals.items():
        if v == generic:
            continue
        nb = nbrs[idx]
        if nb and all(vals[q] == generic for q in nb):
            out.append(idx)
    return tuple(sorted(out))
