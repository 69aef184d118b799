"""Reading and writing field files (YAML documents describing a frame)."""

from __future__ import annotations

import math

import yaml

from .errors import CDiracError
from .field import FieldSpec, FrameExpressionError
from .subspace import DEFAULT_TOL


class FieldFileError(CDiracError, ValueError):
    """Malformed field file; ``line`` and ``column`` are 1-based when known."""

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = path or "<field>"
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")
        self.message = message


def _mark(node):
    return node.start_mark.line + 1, node.start_mark.column + 1


def _mapping_get(node, key):
    for k, v in node.value:
        if k.value == key:
            return v
    return None


def load_field_text(text, path=None):
    """Parse field-file text into a FieldSpec."""
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        raise FieldFileError(f"not a valid document: {getattr(exc, 'problem', exc)}", path, line, col) from None
    if not isinstance(data, dict) or root is None:
        raise FieldFileError("top level must be a mapping", path, 1)

    def fail(msg, node=None):
        line, col = _mark(node) if node is not None else (None, None)
        raise FieldFileError(msg, path, line, col)

    for key in ("dim", "coords", "frame"):
        if key not in data:
            fail(f"missing key {key!r}", root)
    allowed = {"dim", "coords", "frame", "box", "tol", "name"}
    unknown = [k for k, _ in root.value if k.value not in allowed]
    if unknown:
        fail(f"unknown keys {sorted(k.value for k in unknown)}", unknown[0])
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim <= 0:
        fail("dim must be a positive integer", _mapping_get(root, "dim"))
    coords = data["coords"]
    if not isinstance(coords, list) or not all(isinstance(c, str) for c in coords) or len(coords) != dim:
        fail(f"coords must be a list of {dim} names", _mapping_get(root, "coords"))
    frame_node = _mapping_get(root, "frame")
    frame = data["frame"]
    if not isinstance(frame, list) or len(frame) != dim:
        fail(f"frame must be a list of {dim} sections", frame_node)
    sections = []
    for j, sec in enumerate(frame):
        sec_node = frame_node.value[j]
        if not isinstance(sec, dict) or set(sec) != {"vector", "covector"}:
            fail("each frame section needs exactly the keys 'vector' and 'covector'", sec_node)
        parts = []
        for key in ("vector", "covector"):
            vals = sec[key]
            if not isinstance(vals, list) or len(vals) != dim:
                fail(f"{key} must list {dim} expressions", _mapping_get(sec_node, key))
            parts.append([_expr_text(v) for v in vals])
        sections.append(parts)
    box = data.get("box")
    if box is not None:
        ok = isinstance(box, list) and len(box) == 2 and all(
            isinstance(row, list) and len(row) == dim and all(_is_real(x) for x in row) for row in box
        )
        if not ok:
            fail(f"box must be [[lower x{dim}], [upper x{dim}]]", _mapping_get(root, "box"))
        box = [[_as_real(x) for x in row] for row in box]
    tol = _as_real(data.get("tol", DEFAULT_TOL))
    if tol is None or not 0 < tol < 1:
        fail("tol must be a number in (0, 1)", _mapping_get(root, "tol"))
    name = str(data.get("name", path or "field"))
    try:
        return FieldSpec.from_vectors(dim, coords, sections, name=name, box=box, tol=float(tol))
    except FrameExpressionError as exc:
        part = "vector" if exc.component < dim else "covector"
        comp = exc.component % dim
        node = _mapping_get(frame_node.value[exc.section], part).value[comp]
        line, col = _mark(node)
        cause = exc.cause
        raise FieldFileError(
            f"frame[{exc.section}].{part}[{comp}] {text_repr(sections[exc.section][0 if part == 'vector' else 1][comp])}: {cause}",
            path,
            line,
            col,
        ) from None
    except ValueError as exc:
        fail(str(exc), root)


def text_repr(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _as_real(x):
    """Float value of a YAML scalar, or None; strings such as '1e-9' count as numbers."""
    if isinstance(x, bool):
        return None
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        try:
            return float(x)
        except ValueError:
            return None
    return None


def _is_real(x):
    v = _as_real(x)
    return v is not None and math.isfinite(v)


def _expr_text(v):
    if isinstance(v, bool) or v is None:
        raise FieldFileError(f"invalid expression {v!r}")
    return str(v)


def load_field_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FieldFileError(f"cannot read: {exc.strerror}", str(path)) from None
    return load_field_text(text, str(path))


def dump_field(spec, provenance=(), summary=None):
    """Field-file text for ``spec`` with provenance comments at the top."""
    lines = []
    if summary:
        lines.append(f"# {summary}")
    lines.extend(f"# {p}" for p in provenance)
    lines.append(f"name: {spec.name}")
    lines.append(f"dim: {spec.dim}")
    lines.append("coords: [" + ", ".join(spec.coords) + "]")
    if spec.box is not None:
        rows = ["[" + ", ".join(repr(float(x)) for x in row) + "]" for row in spec.box]
        lines.append("box: [" + ", ".join(rows) + "]")
    if spec.tol != DEFAULT_TOL:
        lines.append(f"tol: {spec.tol!r}")
    lines.append("frame:")
    m = spec.dim
    for sec in spec.frame:
        lines.append("  - vector: [" + ", ".join(text_repr(t) for t in sec[:m]) + "]")
        lines.append("    covector: [" + ", ".join(text_repr(t) for t in sec[m:]) + "]")
    return "\n".join(lines) + "\n"
