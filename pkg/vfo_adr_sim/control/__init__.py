from vfo_adr_sim.control.adr import (
    AdrController,
    AdrGains,
    EsoBank,
    commanded_configuration_rate,
    control_force,
    eso_derivative,
    eso_matrices,
    eso_outputs,
)
from vfo_adr_sim.control.scaling import RateLimiter, VelocityLimits, scale_commanded_velocities
from vfo_adr_sim.control.vfo import (
    AuxiliaryState,
    CommandedVelocity,
    VfoController,
    VfoGains,
    VfoOutput,
    atan2c,
    auxiliary_orientation,
    auxiliary_orientation_derivative,
    commanded_velocities,
    convergence_field_angular,
    convergence_field_longitudinal,
    hdot_longitudinal_estimate,
    roll_stabilizer,
)

__all__ = [
    "AdrController",
    "AdrGains",
    "AuxiliaryState",
    "CommandedVelocity",
    "EsoBank",
    "RateLimiter",
    "VelocityLimits",
    "VfoController",
    "VfoGains",
    "VfoOutput",
    "atan2c",
    "auxiliary_orientation",
    "auxiliary_orientation_derivative",
    "commanded_configuration_rate",
    "commanded_velocities",
    "control_force",
    "convergence_field_angular",
    "convergence_field_longitudinal",
    "eso_derivative",
    "eso_matrices",
    "eso_outputs",
    "hdot_longitudinal_estimate",
    "roll_stabilizer",
    "scale_commanded_velocities",
]
