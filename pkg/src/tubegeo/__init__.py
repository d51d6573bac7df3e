"""Complex geodesics of convex tube domains from boundary measures.

Core layers: circle measures and their spherical decomposition, holomorphic
evaluation from boundary data, convex base geometry (support, faces, cones),
real-trace quadratic dual maps, geodesy construction/verification, and
Reinhardt-domain extremal lifts with Lempert/Kobayashi bounds.
"""

from .circle import ANGLE_TOL, CirclePoint
from .errors import (
    ConstructionError,
    DomainInputError,
    EvaluationDomainError,
    InvalidAtomError,
    NonIntegrableDensity,
    QuadratureError,
    TubeGeoError,
    UnsupportedReduction,
)
from .geodesics import (
    GeodesicCandidate,
    VerificationReport,
    construct,
    construct_dn,
    construct_halfplane,
    eval_candidate,
    face_density,
    reduce_dimension,
    verify,
)
from .herglotz import HerglotzMap, poincare_distance
from .measures import (
    Atom,
    BoundaryMeasureTuple,
    DensityFn,
    SphericalDecomposition,
    component_atoms,
    constant_density,
    density_from_json,
    measures_allclose,
    recombine,
    spherical_decompose,
    total_mass,
    trig_density,
    zero_density,
)
from .reinhardt import (
    DiscAutomorphism,
    ExtremalCandidate,
    ReinhardtDomain,
    classify_proposition,
    coordinate_disc_candidate,
    gapq_extremal,
    gapq_extremal_boundary,
    kobayashi_value,
    lempert_value,
    log_image,
    reinhardt_builtin,
    strip_map,
)
from .trace_poly import PositiveFactor, TraceQuadratic
from .tube_geometry import (
    FaceDescription,
    TubeDomain,
    builtin,
    domain_from_json,
    oracle_support,
    sd_ray_check,
)

__version__ = "0.1.0"
