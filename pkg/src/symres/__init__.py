"""Symbolic-numeric workbench for resolvent expansions, logarithm symbols,
noncommutative residues and their trace-coefficient identities on flat model
geometries, with independent spectral oracles."""

from .symexpr import (
    DomainError,
    Expr,
    ScalarField,
    SphereRule,
    UsageError,
    evaluate,
    differentiate,
    homogeneity_check,
    parse_prefix,
    sphere_quadrature,
    to_prefix,
)
from .parametrix import (
    ConstructionError,
    DifferentialOperator,
    ParamSymbol,
    ParamTerm,
    PolyhomSymbol,
    compose,
    compose_param,
    commutator_resolvent_terms,
    integrability_report,
    resolvent_difference,
    resolvent_expansion,
)
from .logresidue import (
    KeyholeContour,
    LogSymbol,
    lemma12_check,
    log_commutator_symbol,
    log_difference_symbol,
    log_symbol,
    log_transform,
    noncommutative_residue,
    c0_interior,
    radial_reduce,
    verify_t14,
    verify_t22,
    verify_t23,
)
from .boundary import (
    CylinderSpec,
    HalfplaneRational,
    SGKernel,
    dirichlet_resolvent_sgo,
    fgls_residue,
    halfplane_split,
    normal_trace,
    sgo_compose,
    verify_ex53_t52,
    verify_t310_model,
)
from .oracle import (
    ExpansionFit,
    FitError,
    OracleError,
    SpectrumSpec,
    build_matrix,
    fit_expansion,
    resolvent_trace,
    zeta_at_zero,
)

__version__ = "0.1.0"
