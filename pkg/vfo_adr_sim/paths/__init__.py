from vfo_adr_sim.paths.builtin import ellipse_path, helix_path, path_from_spec, sample_path_points
from vfo_adr_sim.paths.geometry import (
    FiniteDifferenceSurface,
    FrameRates,
    GradientBounds,
    LevelSurface,
    PathFrame,
    PathSpec,
    PolynomialTrigSurface,
    SurfaceTerm,
    desired_orientation,
    evaluate_frame,
    frame_time_derivatives,
)
from vfo_adr_sim.paths.validation import PathValidationReport, validate_path

__all__ = [
    "FiniteDifferenceSurface",
    "FrameRates",
    "GradientBounds",
    "LevelSurface",
    "PathFrame",
    "PathSpec",
    "PathValidationReport",
    "PolynomialTrigSurface",
    "SurfaceTerm",
    "desired_orientation",
    "ellipse_path",
    "evaluate_frame",
    "frame_time_derivatives",
    "helix_path",
    "path_from_spec",
    "sample_path_points",
    "validate_path",
]
