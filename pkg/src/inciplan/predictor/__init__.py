from inciplan.predictor.baselines import (
    HistoricalAverageBaseline,
    LatestObservationBaseline,
)
from inciplan.predictor.dataset import (
    SampleSet,
    build_samples,
    exclude_engagement_days,
    split_train_test,
    validation_tail,
)
from inciplan.predictor.lasso import (
    LassoRegression,
    alpha_deactivation_bound,
    build_lagged_matrix,
    coordinate_descent,
    kkt_violation,
    soft_threshold,
)
from inciplan.predictor.metrics import horizon_table, mape, rmse
from inciplan.predictor.seq2seq import Seq2SeqSpeedForecaster, TrainHistory

__all__ = [
    "HistoricalAverageBaseline",
    "LassoRegression",
    "LatestObservationBaseline",
    "SampleSet",
    "Seq2SeqSpeedForecaster",
    "TrainHistory",
    "alpha_deactivation_bound",
    "build_lagged_matrix",
    "build_samples",
    "coordinate_descent",
    "exclude_engagement_days",
    "horizon_table",
    "kkt_violation",
    "mape",
    "rmse",
    "soft_threshold",
    "split_train_test",
    "validation_tail",
]
