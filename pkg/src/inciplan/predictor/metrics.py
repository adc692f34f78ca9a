"""Forecast error metrics and the model-by-horizon report table."""

from __future__ import annotations

import numpy as np

from inciplan.domain import DomainError


def rmse(pred, actual) -> float:
    pred = np.asarray(pred, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if pred.shape != actual.shape:
        raise DomainError(f"rmse shape mismatch: {pred.shape} vs {actual.shape}")
    return float(np.sqrt(np.mean((pred - actual) ** 2)))


def mape(pred, actual) -> float:
    """Mean absolute percentage error with the FORECAST in the denominator,
    so under-predicting congestion growth is penalized more heavily."""
    pred = np.asarray(pred, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if pred.shape != actual.shape:
        raise DomainError(f"mape shape mismatch: {pred.shape} vs {actual.shape}")
    if np.any(pred <= 0):
        raise DomainError("mape requires strictly positive forecasts")
    return float(np.mean(np.abs(actual - pred) / pred))


def horizon_table(
    results: dict[str, dict[int, float]],
    metric_name: str,
    horizons=(5, 10, 15, 20, 25, 30),
) -> str:
    """Render a model-by-horizon text table (rows = models, columns = minutes)."""
    name_width = max(len(m) for m in results) + 2
    header = f"{metric_name:<{name_width}}" + "".join(f"{h:>4d} min" for h in horizons)
    lines = [header, "-" * len(header)]
    for model, per_horizon in results.items():
        cells = "".join(f"{per_horizon[h]:>8.3f}" for h in horizons)
        lines.append(f"{model:<{name_width}}{cells}")
    return "\n".join(lines)
