"""Exact torsion-free test and parametrization of linear constant-coefficient PDE systems."""

from .analysis import (
    Parametrization,
    TestReport,
    TorsionCertificate,
    compatibility_conditions,
    extract_torsion,
    generic_rank,
    is_torsion_element,
    localize_corank1,
    parametrize,
    presentation_independence_check,
    torsion_free_test,
)
from .diffop import (
    ModuleVector,
    OperatorMatrix,
    OperatorTemplate,
    adjoint,
    adjoint_contravariance_check,
    compose,
    substitute_params,
)
from .dsl import lower_to_operator, parse_system, render_dsl
from .gallery import gallery_build
from .groebner import buchberger, membership, module_equal, normal_form, syzygies
from .janet import (
    full_torsion_check,
    involutive_completion,
    is_involutive,
    janet_multiplicative,
    spencer_form,
)
from .poly import DEGREVLEX, MonomialOrder, Polynomial, monomial_cmp, poly_add, poly_mul, poly_negate_vars

__version__ = "0.1.0"

__all__ = [
    "Parametrization",
    "TestReport",
    "TorsionCertificate",
    "compatibility_conditions",
    "extract_torsion",
    "generic_rank",
    "is_torsion_element",
    "localize_corank1",
    "parametrize",
    "presentation_independence_check",
    "torsion_free_test",
    "ModuleVector",
    "OperatorMatrix",
    "OperatorTemplate",
    "adjoint",
    "adjoint_contravariance_check",
    "compose",
    "substitute_params",
    "lower_to_operator",
    "parse_system",
    "render_dsl",
    "gallery_build",
    "buchberger",
    "membership",
    "module_equal",
    "normal_form",
    "syzygies",
    "full_torsion_check",
    "involutive_completion",
    "is_involutive",
    "janet_multiplicative",
    "spencer_form",
    "DEGREVLEX",
    "MonomialOrder",
    "Polynomial",
    "monomial_cmp",
    "poly_add",
    "poly_mul",
    "poly_negate_vars",
]
