"""Exact computer algebra for deformations of finite affine group actions.

Truncated symbol calculus over Gaussian rationals, cochain complexes with a
star product given by operator composition, and order-by-order solvers for
the deformation equation, all with zero-tolerance verification.
"""

from .affine import AffineDiffeo, affine_compose, affine_invert, poly_compose_affine
from .cochains import (
    CheckReport,
    Cochain,
    MCElement,
    additive_cocycle_check,
    coboundary_intertwiner_check,
    conjugate_by_unit,
    cup_star,
    differential_d,
    gauge_relation_check,
    mc_residual,
    representation_check,
    twisted_differential,
    xi_multiplicative_cocycle_check,
)
from .errors import (
    ContextMismatch,
    DimensionMismatch,
    GradingViolation,
    GroupAxiomError,
    NotInvertible,
    Obstruction,
    SingularMatrix,
    StarComplexError,
    TruncationMismatch,
    ValidationError,
)
from .groups import (
    AffineAction,
    FiniteGroup,
    action_validate,
    build_group,
    cyclic_group,
    enumerate_tuples,
    permutation_action_s3,
    rotation_action_z3,
    sign_action_z2,
    symmetric3_group,
    trivial_action,
    z2_group,
)
from .polynomials import PolyFunction
from .scalars import GaussianRational
from .solver import (
    CochainVector,
    CohomologyReport,
    GradedBasis,
    LinearMap,
    averaging_homotopy_oracle,
    cohomology_report,
    group_cohomology_differential,
    matrix_of_twisted_d,
    mc_extend,
    rigidity_gauge,
    solve_order,
    trivial_action_split_check,
)
from .symbols import (
    Amplitude,
    FormalFunction,
    FormalSymbol,
    XiPolynomial,
    amplitude_of_symbol,
    asymptotic_symbol,
    conjugate_by_diffeo,
    diff_op_apply,
    diffop_symbol_compose,
    invert_unit,
    op_apply,
    star_compose,
    star_pair,
)

__version__ = "0.1.0"
