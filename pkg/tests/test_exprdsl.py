import math

import pytest
from dsl_oracle import XYZ, max_relative_error

from cdirac import exprdsl as ex
from cdirac.exprdsl import BinOp, Call, DomainError, ExprSyntaxError, Imag, Neg, Num, Pow, UnknownIdentifier, Var


def test_differential_against_reference_oracle():
    assert max_relative_error(1000, 2024) < 1e-12


# -- parsing ------------------------------------------------------------------


def test_parse_call():
    assert ex.parse("exp(y)", XYZ) == Call("exp", Var("y"))


def test_power_binds_tighter_than_unary_minus():
    assert ex.parse("-x^2", XYZ) == Neg(Pow(Var("x"), Num(2.0)))


def test_power_is_right_associative():
    assert ex.parse("x^2^3", XYZ) == Pow(Var("x"), Pow(Num(2.0), Num(3.0)))


def test_left_associative_subtraction():
    assert ex.parse("x - y - z", XYZ) == BinOp("-", BinOp("-", Var("x"), Var("y")), Var("z"))


def test_imaginary_unit_times_variable():
    assert ex.parse("i*(y)", XYZ) == BinOp("*", Imag(), Var("y"))


def test_whitespace_insensitive():
    assert ex.parse(" 1 +\tx*  y ", XYZ) == ex.parse("1+x*y", XYZ)


def test_reserved_coordinate_names_rejected():
    with pytest.raises(ValueError):
        ex.parse("x", ("x", "exp"))


@pytest.mark.parametrize(
    "text",
    ["exp(y) + i*y", "-x^2", "(1 + i)^2", "x^-1.5", "-(x - y) / (z * 2)", "sin(cos(x))^3", "x^2^3", "1e-3*x"],
)
def test_pretty_print_is_a_fixed_point(text):
    e = ex.parse(text, XYZ)
    assert ex.parse(ex.to_text(e), XYZ) == e
    assert ex.to_text(ex.parse(ex.to_text(e), XYZ)) == ex.to_text(e)


# -- golden error positions ----------------------------------------------------


def test_unknown_identifier_offset():
    with pytest.raises(UnknownIdentifier) as info:
        ex.parse("i*(w)", XYZ)
    assert (info.value.position, info.value.name) == (3, "w")


def test_no_implicit_multiplication():
    with pytest.raises(ExprSyntaxError) as info:
        ex.parse("2x", XYZ)
    assert info.value.position == 1
    assert info.value.found == "x"


def test_missing_operand_at_end():
    with pytest.raises(ExprSyntaxError) as info:
        ex.parse("x +", XYZ)
    assert info.value.position == 3
    assert info.value.found is None
    assert "(" in info.value.expected


def test_unbalanced_parenthesis():
    with pytest.raises(ExprSyntaxError) as info:
        ex.parse("sin(x", XYZ)
    assert info.value.position == 5
    assert ")" in info.value.expected


def test_offsets_count_bytes_not_characters():
    # "é" is two bytes in UTF-8
    with pytest.raises(ExprSyntaxError) as info:
        ex.parse("x + é", XYZ)
    assert info.value.position == 4
    # a no-break space is whitespace but occupies two bytes
    with pytest.raises(UnknownIdentifier) as info:
        ex.parse("x +\u00a0w", XYZ)
    assert info.value.position == 5


def test_stray_character_positions():
    with pytest.raises(ExprSyntaxError) as info:
        ex.parse("x*ü*y", XYZ)
    assert info.value.position == 2
    with pytest.raises(ExprSyntaxError) as info:
        ex.parse("x + y )", XYZ)
    assert info.value.position == 6


def test_non_literal_exponent_is_rejected():
    with pytest.raises(ExprSyntaxError) as info:
        ex.parse("x^y", XYZ)
    assert info.value.position == 2


# -- evaluation -----------------------------------------------------------------


def test_i_squared():
    assert ex.evaluate(ex.parse("i*i", XYZ), {}) == -1


def test_exp_of_one():
    assert ex.evaluate(ex.parse("exp(y)", XYZ), {"y": 1.0}) == pytest.approx(math.e, rel=1e-15)


def test_integer_power_of_complex():
    assert ex.evaluate(ex.parse("(1+i)^2", XYZ), {}) == 2j


def test_fractional_power_uses_principal_branch():
    assert ex.evaluate(ex.parse("x^0.5", XYZ), {"x": -4.0}) == pytest.approx(2j)


def test_log_of_zero_raises_with_point():
    f = ex.compile_expr(ex.parse("log(x)", XYZ), XYZ)
    with pytest.raises(DomainError) as info:
        f([0.0, 1.0, 2.0])
    assert info.value.point == {"x": 0.0, "y": 1.0, "z": 2.0}


def test_division_by_zero_raises():
    with pytest.raises(DomainError):
        ex.evaluate(ex.parse("1/(x - x)", XYZ), {"x": 3.0})


def test_unbound_coordinate():
    with pytest.raises(KeyError):
        ex.evaluate(ex.parse("x + y", XYZ), {"x": 1.0})
