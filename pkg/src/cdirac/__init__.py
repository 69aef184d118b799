"""Pointwise invariants, normal forms and field diagnostics for complex Dirac structures."""

from .classify import (
    NormalForm,
    TetraCoord,
    hat,
    is_cr_type,
    leaf_restriction,
    max_type_normal_form,
    normal_form,
    split_k_correction,
    splitting_verify,
    tetra_coords,
    type0_normal_form,
)
from .dirac import (
    DiracPoint,
    InvariantRecord,
    b_transform,
    backward_image,
    complexify_real_dirac,
    forward_image,
    from_complex_structure,
    from_cr,
    from_poisson,
    from_presymplectic,
    from_transverse_cr,
    invariants,
    make_dirac,
    product,
    random_lagrangian,
    real_index,
    reduced_gc,
)
from .field import FieldSpec, analyze_grid, dorfman_bracket_fd, eval_field, involutivity_residual, k_field_check
from .subspace import DEFAULT_TOL, ComplexSubspace, RealSubspace, gap

__version__ = "0.1.0"
