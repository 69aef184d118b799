"""Built-in example fields.

Every entry is a frame of m sections (vector part, covector part) written in
the expression language, together with a default box and the set where its
invariants are expected to jump.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import FieldSpec


@dataclass(frozen=True)
class Entry:
    name: str
    summary: str
    provenance: tuple
    coords: tuple
    sections: tuple
    box: tuple
    jump_set: str = "none"
    involutive: bool = True

    @property
    def dim(self):
        return len(self.coords)

    def spec(self, tol=None):
        kw = {} if tol is None else {"tol": tol}
        return FieldSpec.from_vectors(self.dim, self.coords, self.sections, name=self.name, box=self.box, **kw)


def _box(m, lo=-1.0, hi=1.0):
    return ((lo,) * m, (hi,) * m)


_ENTRIES = [
    Entry(
        "jump_r3",
        "order and type change with constant real index one (f(y) = y)",
        (
            "E = <d/dx, e^y d/dy + i f(y) d/dz> with f(y) = y, eps = i dx^dy on E.",
            "Sections: d/dx + i dy, e^y d/dy + i y d/dz - i e^y dx, y dy + i e^y dz.",
            "(r, s, k) = (1, 1, 0) on the plane y = 0 and (1, 0, 1) elsewhere.",
            "K = R (f(y) d/dx + e^y dz).",
        ),
        ("x", "y", "z"),
        (
            (("1", "0", "0"), ("0", "i", "0")),
            (("0", "exp(y)", "i*y"), ("-i*exp(y)", "0", "0")),
            (("0", "0", "0"), ("0", "y", "i*exp(y)")),
        ),
        _box(3),
        jump_set="y = 0",
    ),
    Entry(
        "symplectic_r4",
        "constant L_{i omega} for the canonical symplectic form on R^4",
        (
            "omega = dx1^dy1 + dx2^dy2, L = {X + i omega(X)}.",
            "Generalized complex of type 0: (r, s, k) = (0, 0, 0).",
        ),
        ("x1", "y1", "x2", "y2"),
        (
            (("1", "0", "0", "0"), ("0", "i", "0", "0")),
            (("0", "1", "0", "0"), ("-i", "0", "0", "0")),
            (("0", "0", "1", "0"), ("0", "0", "0", "i")),
            (("0", "0", "0", "1"), ("0", "0", "-i", "0")),
        ),
        _box(4),
    ),
    Entry(
        "complex_r4",
        "constant complex structure on R^4 = C^2, L_J = T01 + T*10",
        (
            "J d/dx_j = d/dy_j; L_J spanned by d/dx_j + i d/dy_j and dx_j + i dy_j.",
            "Generalized complex of type 2: (r, s, k) = (0, 0, 2).",
        ),
        ("x1", "y1", "x2", "y2"),
        (
            (("1", "i", "0", "0"), ("0", "0", "0", "0")),
            (("0", "0", "1", "i"), ("0", "0", "0", "0")),
            (("0", "0", "0", "0"), ("1", "i", "0", "0")),
            (("0", "0", "0", "0"), ("0", "0", "1", "i")),
        ),
        _box(4),
    ),
    Entry(
        "cr_r3",
        "constant corank-one CR structure on R^3",
        (
            "T10 = <d/dx - i d/dy>, L = T10 + Ann T10.",
            "CR type: (r, s, k) = (1, 1, 1).",
        ),
        ("x", "y", "z"),
        (
            (("1", "-i", "0"), ("0", "0", "0")),
            (("0", "0", "0"), ("i", "1", "0")),
            (("0", "0", "0"), ("0", "0", "1")),
        ),
        _box(3),
    ),
    Entry(
        "foliation_gc_r3",
        "leafwise symplectic structure g dx^dy on the foliation z = const",
        (
            "g = 1 + x^2 + z^2; L = {X + i g iota_X(dx^dy) : X in <d/dx, d/dy>} + R dz.",
            "(r, s, k) = (1, 1, 0) everywhere.",
        ),
        ("x", "y", "z"),
        (
            (("1", "0", "0"), ("0", "i*(1 + x^2 + z^2)", "0")),
            (("0", "1", "0"), ("-i*(1 + x^2 + z^2)", "0", "0")),
            (("0", "0", "0"), ("0", "0", "1")),
        ),
        _box(3),
    ),
    Entry(
        "bfield_symplectic_r4",
        "closed B-field transform of the canonical L_{i omega} on R^4",
        (
            "B = sin(x1) dx1^dx2 is closed; L = e^B L_{i omega}.",
            "(r, s, k) = (0, 0, 0) everywhere.",
        ),
        ("x1", "y1", "x2", "y2"),
        (
            (("1", "0", "0", "0"), ("0", "i", "sin(x1)", "0")),
            (("0", "1", "0", "0"), ("-i", "0", "0", "0")),
            (("0", "0", "1", "0"), ("-sin(x1)", "0", "0", "i")),
            (("0", "0", "0", "1"), ("0", "0", "-i", "0")),
        ),
        _box(4),
    ),
    Entry(
        "dirac_complexified_r3",
        "complexification of the real Dirac structure L(<d/dx, d/dy>, dx^dy) on R^3",
        (
            "L = (L(E, dx^dy))_C with E = <d/dx, d/dy>, so L equals its conjugate.",
            "(r, s, k) = (3, 1, 0) everywhere.",
        ),
        ("x", "y", "z"),
        (
            (("1", "0", "0"), ("0", "1", "0")),
            (("0", "1", "0"), ("-1", "0", "0")),
            (("0", "0", "0"), ("0", "0", "1")),
        ),
        _box(3),
    ),
    Entry(
        "split_r5",
        "synthetic split instance e^B(CR x L_{i omega}) on R^3 x R^2",
        (
            "CR factor T10 = <d/dx - i d/dy> on R^3, omega = du^dv on R^2.",
            "B = dx^du + 0.5 dz^dv (constant, hence closed).",
            "(r, s, k) = (1, 1, 1); the R^3 factor is the CR-type part.",
        ),
        ("x", "y", "z", "u", "v"),
        (
            (("1", "-i", "0", "0", "0"), ("0", "0", "0", "1", "0")),
            (("0", "0", "0", "0", "0"), ("i", "1", "0", "0", "0")),
            (("0", "0", "0", "0", "0"), ("0", "0", "1", "0", "0")),
            (("0", "0", "0", "1", "0"), ("-1", "0", "0", "0", "i")),
            (("0", "0", "0", "0", "1"), ("0", "0", "-0.5", "-i", "0")),
        ),
        _box(5),
    ),
    Entry(
        "noninvolutive_r3",
        "lagrangian but not involutive: E = <d/dx, d/dy + x d/dz>, eps = 0",
        (
            "Sections d/dx, d/dy + x d/dz, dz - x dy.",
            "[d/dx, d/dy + x d/dz] = d/dz is not in E, so L is not a Dirac structure.",
            "Pointwise (r, s, k) = (3, 1, 0).",
        ),
        ("x", "y", "z"),
        (
            (("1", "0", "0"), ("0", "0", "0")),
            (("0", "1", "x"), ("0", "0", "0")),
            (("0", "0", "0"), ("0", "-x", "1")),
        ),
        _box(3),
        involutive=False,
    ),
]

CATALOG = {e.name: e for e in _ENTRIES}


def names():
    return list(CATALOG)


def get(name):
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown example {name!r}; available: {', '.join(CATALOG)}") from None


def jump_k_frame(p, f=lambda y: y):
    """Predicted generator f(y) d/dx + e^y dz of K for the jump_r3 field."""
    _, y, _ = p
    return np.array([f(y), 0.0, 0.0, 0.0, 0.0, np.exp(y)])
