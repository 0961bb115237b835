from macrodc.fleet.scenario import (
    DemandCurve,
    DemandStep,
    EconSettings,
    RelocationSpec,
    Scenario,
    SiteSpec,
    Strategy,
)
from macrodc.fleet.simulation import (
    FleetTrace,
    Metrics,
    RedundancyComparison,
    ReplicationRecord,
    compare_redundancy,
    econ_inputs,
    run,
)
from macrodc.fleet.trace import FleetEvent, ReplicationMetrics, read_trace, replay
from macrodc.fleet.yard import SiteState, relocate, yard_area

__all__ = [
    "DemandCurve",
    "DemandStep",
    "EconSettings",
    "FleetEvent",
    "FleetTrace",
    "Metrics",
    "RedundancyComparison",
    "RelocationSpec",
    "ReplicationMetrics",
    "ReplicationRecord",
    "Scenario",
    "SiteSpec",
    "SiteState",
    "Strategy",
    "compare_redundancy",
    "econ_inputs",
    "read_trace",
    "relocate",
    "replay",
    "run",
    "yard_area",
]
