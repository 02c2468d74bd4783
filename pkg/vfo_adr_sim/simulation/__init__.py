from vfo_adr_sim.simulation.metrics import Metrics, compute_metrics, format_metrics
from vfo_adr_sim.simulation.runner import funnel_initial_conditions, run_scenario
from vfo_adr_sim.simulation.schemas import ScenarioConfig, with_overrides
from vfo_adr_sim.simulation.trace import CSV_COLUMNS, SimulationTrace

__all__ = [
    "CSV_COLUMNS",
    "Metrics",
    "ScenarioConfig",
    "SimulationTrace",
    "compute_metrics",
    "format_metrics",
    "funnel_initial_conditions",
    "run_scenario",
    "with_overrides",
]
