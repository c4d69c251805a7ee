"""Exact constructions of large subsets of R (and R^n) that contain no
infinite arithmetic progression, with checkable escape certificates."""

from .construction import (
    Basic,
    BlockIndex,
    ExplicitComplement,
    Product,
    ScaledIntersection,
    base_cell,
    beta,
    block_index,
    cell,
    choose_mu_for_lambda,
    choose_N_for_lambda,
    contains,
    lambda_reduction,
    product_for_lambda,
    window,
)
from .errors import (
    ApavoidError,
    MeasureTooLarge,
    NotInSet,
    PreconditionUnmet,
    Undecidable,
    UndecidableBoundary,
    UndecidableFloor,
    UnsupportedSpec,
    ZeroGap,
)
from .escape import (
    EscapeCertificate,
    EquidistDiagnostics,
    NoWitnessWithinDepth,
    Progression,
    certify_escape_rational,
    certify_escape_search,
    check_certificate,
    claim1_verify,
    count_in_half_open,
    equidist_stats,
)
from .finite_complement import ApWitness, find_two_sided_ap, verify_ap_avoids
from .intervals import IntervalSet
from .reals import (
    CertifiedReal,
    Enclosure,
    Quadratic,
    as_real,
    ceil_div,
    format_exact,
    frac,
    locate_subinterval,
    parse_exact,
)

__version__ = "0.1.0"
