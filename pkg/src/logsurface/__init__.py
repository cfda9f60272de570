"""Exact intersection theory for log surface pairs and effective birationality thresholds."""

from .bounds import (
    BoundCertificate,
    BoundInputs,
    birationality_threshold,
    run_pipeline,
    semigroup_decompose,
    semigroup_member,
    verify_certificate,
)
from .errors import DomainError, ParseError, ResourceError, StageError, VerificationError, VersionError
from .numeric import (
    CANONICAL,
    CoefficientSet,
    QDivisor,
    ceil_divisor,
    decompose_boundary,
    floor_divisor,
    round_coefficients,
)
from .programs import (
    BignessCertificate,
    MMPTrace,
    check_projection_formula,
    count_negative_discrepancy,
    redundant_part,
    run_mmp,
    terminalize,
)
from .singularity import (
    SingularityReport,
    brute_force_min_discrepancy,
    cartier_index,
    classify,
    min_discrepancy_snc,
)
from .surface import (
    BlowUpSpec,
    LogPair,
    ModelMorphism,
    SurfaceModel,
    blow_up,
    contract,
    intersect,
    is_nef_on_tracked,
    pullback,
    pushforward,
    volume_nef,
)

__version__ = "0.1.0"
