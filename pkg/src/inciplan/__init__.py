"""Incident signal-plan recommendation engine.

Fuses multi-source traffic, incident and weather feeds, forecasts network
speeds 5-30 minutes ahead with an encoder-decoder GRU, and ranks pre-defined
contingency signal plans with a learned metric kernel.
"""

from inciplan.domain import (
    NULL_PLAN,
    EngagementRecord,
    IncidentStatusFrame,
    NetworkModel,
    SpeedFrame,
    WeatherRecord,
    load_network,
    save_network,
    validate_network,
)

__version__ = "0.1.0"

__all__ = [
    "NULL_PLAN",
    "EngagementRecord",
    "IncidentStatusFrame",
    "NetworkModel",
    "SpeedFrame",
    "WeatherRecord",
    "load_network",
    "save_network",
    "validate_network",
    "__version__",
]
