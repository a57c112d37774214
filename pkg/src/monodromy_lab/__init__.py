"""Computational study of fibrations defined by quotients of products of lines.

The package builds the explicit generic line family, locates and classifies
all critical points of the quotient map, assembles the vanishing-cycle
intersection matrix, computes monodromy orbit spans, and numerically checks
the vanishing of Abelian integrals of admissible logarithmic forms over
ovals around center singularities.
"""

from .arrangement import (
    Arrangement,
    Face,
    Line,
    build_arrangement,
    build_lines,
    build_side_arrangement,
    genericity_check,
    intersect,
)
from .critical import (
    CriticalPoint,
    IndeterminacyPoint,
    ValueGroup,
    find_interior_critical,
    group_values,
    indeterminacy_points,
    saddle_points_exact,
)
from .cycles import (
    SkewIntMatrix,
    VanishingCycle,
    alternating_line_sums,
    build_intersection_matrix,
    enumerate_cycles,
    radical,
    rank_of_block,
)
from .monodromy import (
    MonodromyOperator,
    OrbitResult,
    orbit_span,
    picard_lefschetz_operator,
    value_group_operator,
    verify_orbit_generation,
)
from .integrals import (
    ExactDifferential,
    FDifferential,
    LogFamilyForm,
    OvalTrace,
    Poly2,
    PolynomialForm,
    check_center_vanishing,
    integrate,
    trace_oval,
    winding_oracle,
)
from .pipeline import FibrationData, build_pipeline

__version__ = "0.1.0"
