"""Numerical toolkit for a finite-distortion homeomorphism of the plane
squeezing the unit disk onto an exponential-cusp domain.

The toolkit builds the explicit three-stage map, evaluates its distortion
field, classifies the integrability of powers and exponentials of the
distortion, and runs the weighted-capacity machinery that makes the cusp
geometry quantitative.
"""

from .errors import (
    ConvergenceError,
    DomainError,
    InsufficientData,
    MaskError,
    NodeError,
    ProfileError,
    RangeError,
    SeamError,
    ToolkitError,
)
from .profile import ProfileEval, ProfileParams, depth, depth_inverse, evaluate
from .maps import (
    MapChain,
    MapStage,
    PlanePoint,
    PolarPoint,
    Sector,
    apply_chain,
    apply_chain_inv,
    boundary_image_trace,
    cusp_map,
    cusp_map_inv,
    mobius_to_disk,
    mobius_to_disk_inv,
    mobius_to_halfplane,
    mobius_to_halfplane_inv,
)
from .domains import (
    BoundaryArc,
    ExpCuspDomain,
    PowerCuspDomain,
    arc_diameter,
    boundary_arc,
    preimage_arc_diameter,
)
from .distortion import (
    DistortionSample,
    Jacobian2,
    chain_distortion,
    cusp_jacobian,
    cusp_jacobian_fd,
    distortion,
    distortion_field,
    fit_growth_envelope,
    op_norm,
)
from .quadrature import (
    AnnularScheme,
    IntegrabilityReport,
    Verdict,
    classify,
    distortion_exp_integral,
    distortion_power_integral,
    integrate_annulus,
)
from .capacity import (
    CapacityEstimate,
    CuspTestFunction,
    GridSolverConfig,
    annulus_condenser,
    capacity_lower_bound,
    cusp_test_energy,
    grid_capacity,
    preimage_diameter_bound,
    superpolynomial_decay_check,
    tip_capacity_experiment,
)

__version__ = "0.1.0"
