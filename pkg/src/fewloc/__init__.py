"""fewloc: certified infinitesimal rigidity and few-locations placement
for triangulated surfaces."""

from .complex2 import (
    Complex2,
    ComplexError,
    NotASurfaceError,
    SurfaceReport,
    build_and_validate,
    link_cycle,
    minimal_cycle_check,
    parse_triangulation,
    format_triangulation,
)
from .contraction import (
    ContractionError,
    ContractionStep,
    ReductionSchedule,
    contract_edge,
    contractible,
    reduction_schedule,
    replay,
    vertex_split,
)
from .exact_linalg import PRIME_TABLE, RankCertificate, RationalMatrix
from .generators import (
    GeneratorError,
    LamanInstance,
    MinimalCycleInstance,
    collision_motion_witness,
    cone,
    genus_surface,
    laman_counterexample,
    minimal_cycle_counterexample,
    primitive,
    random_laman,
    random_sphere,
    stacked_sphere,
)
from .placement import (
    LocationSet,
    PlacementError,
    PlacementResult,
    avoidance_set,
    certify_placement,
    check_condition_C,
    generate_locations,
    place,
)
from .rigidity import (
    Framework,
    FrameworkError,
    MotionWitness,
    RigidityResult,
    StressVector,
    is_infinitesimally_rigid,
    motion_witness,
    rigidity_matrix,
    stress_basis,
)

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
