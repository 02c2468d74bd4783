from vfo_adr_sim.dynamics.plant import (
    ELLIPSOID_DAMPING,
    ELLIPSOID_INERTIA,
    ELLIPSOID_UNDERACTUATED_GAMMA,
    SinusoidalDisturbance,
    VehiclePlant,
    ZeroDisturbance,
    coriolis_rigid_body,
    plant_derivative,
)
from vfo_adr_sim.dynamics.rigid_body import (
    Configuration,
    Pseudovelocity,
    angular_velocity_transform,
    angular_velocity_transform_inverse,
    jacobian,
    jacobian_derivative,
    jacobian_inverse,
    rotation_matrix,
)

__all__ = [
    "ELLIPSOID_DAMPING",
    "ELLIPSOID_INERTIA",
    "ELLIPSOID_UNDERACTUATED_GAMMA",
    "Configuration",
    "Pseudovelocity",
    "SinusoidalDisturbance",
    "VehiclePlant",
    "ZeroDisturbance",
    "angular_velocity_transform",
    "angular_velocity_transform_inverse",
    "coriolis_rigid_body",
    "jacobian",
    "jacobian_derivative",
    "jacobian_inverse",
    "plant_derivative",
    "rotation_matrix",
]
