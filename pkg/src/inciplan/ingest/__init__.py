from inciplan.ingest.features import (
    FeatureFrame,
    cyclic_encode,
    day_group_encode,
    reference_speed_from_observations,
    slowdown,
    slowdown_vector,
    time_features,
    tti,
    tti_vector,
)
from inciplan.ingest.imputation import impute_speed, interpolate_weather
from inciplan.ingest.incidents import (
    AlertEvent,
    ClosureEvent,
    filter_alerts,
    filter_closures,
    fuse_incidents,
    interpolate_alert_gap,
    status_timeline,
)
from inciplan.ingest.pipeline import (
    FeatureLayout,
    FeaturePipeline,
    concat_scope_indices,
    speed_frames_from_records,
    weather_for_timeline,
)
from inciplan.ingest.scaling import ClampedMinMaxScaler

__all__ = [
    "AlertEvent",
    "ClampedMinMaxScaler",
    "ClosureEvent",
    "FeatureFrame",
    "FeatureLayout",
    "FeaturePipeline",
    "concat_scope_indices",
    "cyclic_encode",
    "day_group_encode",
    "filter_alerts",
    "filter_closures",
    "fuse_incidents",
    "impute_speed",
    "interpolate_alert_gap",
    "interpolate_weather",
    "reference_speed_from_observations",
    "slowdown",
    "slowdown_vector",
    "speed_frames_from_records",
    "status_timeline",
    "time_features",
    "tti",
    "tti_vector",
    "weather_for_timeline",
]
