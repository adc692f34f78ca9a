from inciplan.associator.evaluation import (
    EngagementWindow,
    RecommendationReport,
    evaluate_recommendations,
    truth_plan_at,
)
from inciplan.associator.metrics import (
    METRIC_TYPES,
    METRIC_VECTOR_LENGTH,
    TTI_THRESHOLDS,
    evaluate_metrics,
    feature_names,
    metric_precision,
    metric_rule,
    metric_similarity,
)
from inciplan.associator.plans import (
    PlanDefinition,
    PlanKeyMatrix,
    load_plans,
    save_plans,
)
from inciplan.associator.query import TrafficQuery, build_query
from inciplan.associator.ranklr import (
    PairwiseRankLR,
    build_pairwise_dataset,
    load_rank_model,
    save_rank_model,
    score_all_plans,
    score_plan,
)
from inciplan.associator.transition import (
    PlanChange,
    PlanState,
    TransitionResult,
    step_transition,
)

__all__ = [
    "EngagementWindow",
    "METRIC_TYPES",
    "METRIC_VECTOR_LENGTH",
    "PairwiseRankLR",
    "PlanChange",
    "PlanDefinition",
    "PlanKeyMatrix",
    "PlanState",
    "RecommendationReport",
    "TTI_THRESHOLDS",
    "TrafficQuery",
    "TransitionResult",
    "build_pairwise_dataset",
    "build_query",
    "evaluate_metrics",
    "evaluate_recommendations",
    "feature_names",
    "load_plans",
    "load_rank_model",
    "metric_precision",
    "metric_rule",
    "metric_similarity",
    "save_plans",
    "save_rank_model",
    "score_all_plans",
    "score_plan",
    "step_transition",
    "truth_plan_at",
]
