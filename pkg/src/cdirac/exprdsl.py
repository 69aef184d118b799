"""A small complex-valued expression language for frame coefficients.

Grammar (precedence ^ > unary minus > * / > + -)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' exponent)?
    exponent := '-'? number ('^' exponent)? | '(' exponent ')'
    atom     := number | 'i' | ident | ident '(' expr ')' | '(' expr ')'

Exponents are real literals, so ``x^2^3`` is ``x^(2^3)`` and ``-x^2`` is
``-(x^2)``.  Error positions are byte offsets into the UTF-8 encoded text.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from typing import Union

from .errors import CDiracError

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "re", "im", "conj")
RESERVED = frozenset(FUNCTIONS) | {"i"}


class ExprSyntaxError(CDiracError, ValueError):
    def __init__(self, position, expected, found=None):
        self.position = position
        self.expected = frozenset(expected)
        self.found = found
        what = "end of input" if found is None else repr(found)
        super().__init__(
            f"syntax error at byte {position}: found {what}, expected one of {sorted(self.expected)}"
        )


class UnknownIdentifier(CDiracError, ValueError):
    def __init__(self, position, name):
        self.position = position
        self.name = name
        super().__init__(f"unknown identifier {name!r} at byte {position}")


class DomainError(CDiracError, ArithmeticError):
    def __init__(self, message, point=None):
        self.point = point
        super().__init__(message if point is None else f"{message} at {point}")


# -- AST ----------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Imag, Var, Neg, BinOp, Pow, Call]


# -- lexer --------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)
_SPACE = re.compile(r"\s*")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text):
    offsets = _byte_offsets(text)
    toks = []
    i = 0
    n = len(text)
    while True:
        i = _SPACE.match(text, i).end()
        if i >= n:
            break
        m = _TOKEN.match(text, i)
        if m is None or m.lastgroup is None:
            raise ExprSyntaxError(offsets[i], {"number", "identifier", "operator", "("}, text[i])
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), offsets[start]))
        i = m.end()
    toks.append(_Tok("end", "", offsets[n]))
    return toks


def _byte_offsets(text):
    out = [0]
    for ch in text:
        out.append(out[-1] + len(ch.encode("utf-8")))
    return out


# -- parser -------------------------------------------------------------------

_ATOM_START = frozenset({"number", "i", "identifier", "(", "-"})


class _Parser:
    def __init__(self, text, coords):
        self.toks = _tokenize(text)
        self.coords = frozenset(coords)
        self.pos = 0

    @property
    def tok(self):
        return self.toks[self.pos]

    def _fail(self, expected):
        tok = self.tok
        raise ExprSyntaxError(tok.pos, expected, None if tok.kind == "end" else tok.text)

    def _take_op(self, ops):
        tok = self.tok
        if tok.kind == "op" and tok.text in ops:
            self.pos += 1
            return tok.text
        return None

    def _expect(self, op):
        if self._take_op((op,)) is None:
            self._fail({op})

    def _close(self):
        if self._take_op((")",)) is None:
            self._fail({")", "+", "-", "*", "/", "^"})

    def parse(self):
        out = self.expr()
        if self.tok.kind != "end":
            self._fail({"+", "-", "*", "/", "^", "end of input"})
        return out

    def expr(self):
        left = self.term()
        while (op := self._take_op(("+", "-"))) is not None:
            left = BinOp(op, left, self.term())
        return left

    def term(self):
        left = self.unary()
        while (op := self._take_op(("*", "/"))) is not None:
            left = BinOp(op, left, self.unary())
        return left

    def unary(self):
        if self._take_op(("-",)):
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self._take_op(("^",)):
            return Pow(base, self.exponent())
        return base

    def exponent(self):
        if self._take_op(("(",)):
            out = self.exponent()
            self._expect(")")
            return out
        if self._take_op(("-",)):
            return Neg(self.exponent_number())
        return self.exponent_number()

    def exponent_number(self):
        tok = self.tok
        if tok.kind != "num":
            self._fail({"number", "-", "("})
        self.pos += 1
        lit = Num(float(tok.text))
        if self._take_op(("^",)):
            return Pow(lit, self.exponent())
        return lit

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.pos += 1
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.pos += 1
            if tok.text in FUNCTIONS:
                self._expect("(")
                arg = self.expr()
                self._close()
                return Call(tok.text, arg)
            if tok.text == "i":
                return Imag()
            if tok.text in self.coords:
                return Var(tok.text)
            raise UnknownIdentifier(tok.pos, tok.text)
        if self._take_op(("(",)):
            out = self.expr()
            self._close()
            return out
        self._fail(_ATOM_START)


def check_coords(coords):
    """Reject coordinate names that are not identifiers or clash with the language."""
    for name in coords:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise ValueError(f"coordinate name {name!r} is not an identifier")
        if name in RESERVED:
            raise ValueError(f"coordinate name {name!r} is reserved")
    if len(set(coords)) != len(coords):
        raise ValueError("duplicate coordinate names")


def parse(text, coords):
    """Parse ``text`` into an immutable Expr; variables must be among ``coords``."""
    check_coords(list(coords))
    return _Parser(text, coords).parse()


# -- pretty printer -----------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e):
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def _num_text(v):
    return repr(float(v))


def _exponent_text(e):
    if isinstance(e, Num):
        return _num_text(e.value)
    if isinstance(e, Neg):
        return "-" + _exponent_text(e.arg)
    if isinstance(e, Pow):
        return f"{_num_text(e.base.value)}^{_exponent_text(e.exponent)}"
    raise TypeError(f"not an exponent: {e!r}")


def to_text(e):
    """Render an Expr as text that parses back to the same tree."""
    if isinstance(e, Num):
        return _num_text(e.value)
    if isinstance(e, Imag):
        return "i"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    if isinstance(e, Neg):
        inner = to_text(e.arg)
        return "-" + (inner if _prec(e.arg) >= 3 else f"({inner})")
    if isinstance(e, Pow):
        base = to_text(e.base)
        if _prec(e.base) < 5:
            base = f"({base})"
        return f"{base}^{_exponent_text(e.exponent)}"
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        left = to_text(e.left)
        right = to_text(e.right)
        if _prec(e.left) < p:
            left = f"({left})"
        if _prec(e.right) <= p:
            right = f"({right})"
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression: {e!r}")


# -- evaluation ---------------------------------------------------------------


def _principal_log(z):
    if z == 0:
        raise ZeroDivisionError("log of zero")
    return cmath.log(z)


def _sqrt(z):
    return cmath.sqrt(z)


_FUNCS = {
    "sin": cmath.sin,
    "cos": cmath.cos,
    "tan": cmath.tan,
    "exp": cmath.exp,
    "log": _principal_log,
    "sqrt": _sqrt,
    "abs": lambda z: complex(abs(z)),
    "re": lambda z: complex(z.real),
    "im": lambda z: complex(z.imag),
    "conj": lambda z: z.conjugate(),
}


def _int_power(a, n):
    if n < 0:
        if a == 0:
            raise ZeroDivisionError("zero to a negative power")
        return 1.0 / _int_power(a, -n)
    out = complex(1.0)
    while n:
        if n & 1:
            out *= a
        a *= a
        n >>= 1
    return out


def power(a, b):
    """a^b with b real: repeated multiplication for integers, exp(b log a) otherwise."""
    b = complex(b)
    if b.imag == 0 and float(b.real).is_integer():
        return _int_power(complex(a), int(b.real))
    return cmath.exp(b * _principal_log(a))


def _compile(e, index):
    if isinstance(e, Num):
        v = complex(e.value)
        return lambda x: v
    if isinstance(e, Imag):
        return lambda x: 1j
    if isinstance(e, Var):
        j = index[e.name]
        return lambda x: complex(x[j])
    if isinstance(e, Neg):
        f = _compile(e.arg, index)
        return lambda x: -f(x)
    if isinstance(e, Call):
        f = _compile(e.arg, index)
        g = _FUNCS[e.func]
        return lambda x: g(f(x))
    if isinstance(e, Pow):
        f = _compile(e.base, index)
        expo = evaluate(e.exponent, {})
        if expo.imag == 0 and float(expo.real).is_integer():
            n = int(expo.real)
            return lambda x: _int_power(f(x), n)
        return lambda x: cmath.exp(expo * _principal_log(f(x)))
    if isinstance(e, BinOp):
        f = _compile(e.left, index)
        g = _compile(e.right, index)
        if e.op == "+":
            return lambda x: f(x) + g(x)
        if e.op == "-":
            return lambda x: f(x) - g(x)
        if e.op == "*":
            return lambda x: f(x) * g(x)
        return lambda x: f(x) / g(x)
    raise TypeError(f"not an expression: {e!r}")


def compile_expr(e, coords):
    """Return f(values) -> complex, with ``values`` ordered as ``coords``.

    Arithmetic failures surface as DomainError carrying the point.
    """
    coords = list(coords)
    f = _compile(e, {c: j for j, c in enumerate(coords)})

    def run(values):
        try:
            out = f(values)
        except (ZeroDivisionError, OverflowError, ValueError) as exc:
            raise DomainError(str(exc), dict(zip(coords, map(float, values)))) from None
        if not cmath.isfinite(out):
            raise DomainError("non-finite value", dict(zip(coords, map(float, values))))
        return out

    return run


def free_vars(e):
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, (Neg, Call)):
        return free_vars(e.arg)
    if isinstance(e, BinOp):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, Pow):
        return free_vars(e.base)
    return set()


def evaluate(e, point):
    """Evaluate ``e`` at ``point`` (a mapping name -> real)."""
    names = sorted(free_vars(e))
    missing = [n for n in names if n not in point]
    if missing:
        raise KeyError(f"unbound coordinates {missing}")
    return compile_expr(e, names)([point[n] for n in names])
