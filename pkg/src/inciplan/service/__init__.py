from inciplan.service.config import (
    CONFIG_ENV_VAR,
    AssociatorConfig,
    Config,
    FeatureConfig,
    PathsConfig,
    PredictorConfig,
    ServerConfig,
    load_config,
    write_default_config,
)
from inciplan.service.eventlog import EngagementLog
from inciplan.service.events import RecommendationEvent

__all__ = [
    "CONFIG_ENV_VAR",
    "AssociatorConfig",
    "Config",
    "EngagementLog",
    "FeatureConfig",
    "PathsConfig",
    "PredictorConfig",
    "RecommendationEvent",
    "ServerConfig",
    "load_config",
    "write_default_config",
]
