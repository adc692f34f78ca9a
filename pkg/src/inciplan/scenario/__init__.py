from inciplan.scenario.fixtures import (
    DEFAULT_NETWORK_ID,
    SCENARIO_INCIDENT_SEGMENT,
    default_network,
    default_plans,
)
from inciplan.scenario.generate import (
    ReplayOutput,
    VisibleFeeds,
    first_alert_times,
    generate,
)
from inciplan.scenario.replay import (
    PersistenceForecaster,
    ReplayEngine,
    ReplayResult,
    StreamingIngest,
    replay,
)
from inciplan.scenario.spec import (
    DAY_START,
    EngagementScript,
    IncidentScript,
    ScenarioSpec,
    load_scenario,
    plan_scenario,
    save_scenario,
    training_scenario,
)

__all__ = [
    "DAY_START",
    "DEFAULT_NETWORK_ID",
    "EngagementScript",
    "IncidentScript",
    "PersistenceForecaster",
    "ReplayEngine",
    "ReplayOutput",
    "ReplayResult",
    "SCENARIO_INCIDENT_SEGMENT",
    "ScenarioSpec",
    "StreamingIngest",
    "VisibleFeeds",
    "default_network",
    "default_plans",
    "first_alert_times",
    "generate",
    "load_scenario",
    "plan_scenario",
    "replay",
    "save_scenario",
    "training_scenario",
]
