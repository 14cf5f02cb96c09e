"""Construction, conversion, bounds and verification of spherical and Gaussian designs."""

__version__ = "0.1.0"

from .approx import (
    EpsilonCertificate,
    construct_l2_approx,
    construct_tensor_approx,
    epsilon_l2,
    multi_strength_tensor_construct,
    tensor_constant,
    tensor_discrepancy,
    tensor_discrepancy_bruteforce,
    tensor_lower_bound,
)
from .builders import (
    OrbitDesign,
    caratheodory_prune,
    cross_polytope,
    fit_weights_on_pool,
    gaussian_product_design,
    orbit_moment,
    orbit_points,
    partitions_up_to,
    reflection_family_check,
    reflection_lower_bound,
    signed_design,
    verify_orbit_design,
)
from .estimators import PoolDesignFitter
from .ffield import SymbolArray, dual_family, independent_vector_set, twise_construct, twise_verify
from .gegenbauer import (
    PolyQ,
    approx_lower_bound,
    delsarte_bound,
    dim_P_gaussian,
    dim_P_sphere,
    dim_W,
    expand_Q_square,
    gegenbauer_Q,
    linearization_coeffs,
    lp_bound,
)
from .kernel import (
    DesignError,
    PiPoly,
    PiValue,
    WeightedPointSet,
    enumerate_multi_indices,
    read_design,
    write_design,
)
from .moments import gaussian_moment, moment, radial_moment, sphere_moment
from .quad1d import Quadrature, gauss_quadrature, radial_design, unweighted_1d_gaussian_design
from .transfer import gaussian_to_spherical, project_gaussian, project_spherical, spherical_to_gaussian
from .verify import VerificationReport, verify_design, verify_odd_vanishing
