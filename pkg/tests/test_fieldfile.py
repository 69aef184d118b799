import numpy as np
import pytest

from cdirac import catalog
from cdirac.fieldfile import FieldFileError, dump_field, load_field_text

MINIMAL = 'dim: 1\ncoords: [x]\nframe:\n  - vector: ["1"]\n    covector: ["0"]\n'


def test_dump_then_load_roundtrip():
    spec = catalog.get("split_r5").spec()
    back = load_field_text(dump_field(spec, provenance=("a note",), summary="split"))
    assert back.coords == spec.coords
    assert back.frame == spec.frame
    assert np.array_equal(back.box, spec.box)
    p = np.linspace(-0.5, 0.5, 5)
    assert np.array_equal(back.frame_matrix(p), spec.frame_matrix(p))


def test_exponent_tolerance_is_a_number():
    assert load_field_text(MINIMAL + "tol: 1e-7\n").tol == 1e-7


def test_bad_tolerance_is_located():
    with pytest.raises(FieldFileError) as info:
        load_field_text(MINIMAL + "tol: 3\n", path="f.yaml")
    assert (info.value.line, "tol" in str(info.value)) == (6, True)


def test_unknown_key_is_located():
    with pytest.raises(FieldFileError) as info:
        load_field_text(MINIMAL + "colour: red\n", path="f.yaml")
    assert info.value.line == 6
    assert "colour" in str(info.value)


def test_expression_error_points_into_the_file():
    text = 'dim: 1\ncoords: [x]\nframe:\n  - vector: ["1"]\n    covector: ["x +"]\n'
    with pytest.raises(FieldFileError) as info:
        load_field_text(text, path="f.yaml")
    msg = str(info.value)
    assert msg.startswith("f.yaml:5:")
    assert "frame[0].covector[0]" in msg
    assert "byte 3" in msg


def test_box_shape_checked():
    with pytest.raises(FieldFileError):
        load_field_text(MINIMAL + "box: [[-1, 0], [1, 1]]\n")
