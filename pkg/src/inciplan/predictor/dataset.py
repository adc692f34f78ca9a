"""Supervised sample assembly and splits for the speed forecaster."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from inciplan.domain import DomainError

MINUTES_PER_DAY = 1440


@dataclass
class SampleSet:
    """Aligned training samples.

    X: encoder windows [N x lookback x feature_width]
    y0: decoder seed = scaled target speeds at the window's last step [N x targets]
    Y: teacher sequence = scaled target speeds at +1..+horizon steps [N x horizon x targets]
    timestamps: base time of each sample (the window's last step)
    """

    X: np.ndarray
    y0: np.ndarray
    Y: np.ndarray
    timestamps: np.ndarray

    def __len__(self) -> int:
        return self.X.shape[0]

    def subset(self, idx) -> "SampleSet":
        return SampleSet(self.X[idx], self.y0[idx], self.Y[idx], self.timestamps[idx])


def build_samples(
    features: np.ndarray,
    targets_scaled: np.ndarray,
    timestamps,
    lookback: int = 12,
    horizon: int = 6,
) -> SampleSet:
    """Slide a (lookback, +horizon) window over a contiguous feature matrix."""
    timestamps = np.asarray(timestamps)
    if features.shape[0] != targets_scaled.shape[0] != len(timestamps):
        raise DomainError("features, targets, and timestamps must align")
    steps = np.diff(timestamps)
    if steps.size and not np.all(steps == 5):
        raise DomainError("sample assembly requires contiguous 5-minute timestamps")
    n_total = features.shape[0]
    first = lookback - 1
    last = n_total - horizon  # exclusive
    if last <= first:
        raise DomainError(
            f"series of length {n_total} too short for lookback {lookback} + horizon {horizon}"
        )
    X, y0, Y, ts = [], [], [], []
    for t in range(first, last):
        X.append(features[t - lookback + 1 : t + 1])
        y0.append(targets_scaled[t])
        Y.append(targets_scaled[t + 1 : t + horizon + 1])
        ts.append(timestamps[t])
    return SampleSet(np.stack(X), np.stack(y0), np.stack(Y), np.array(ts))


def split_train_test(
    samples: SampleSet,
    train_frac: float = 0.8,
    block_len: int = 12,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Temporal-blocked random split: shuffle contiguous blocks, not samples."""
    n = len(samples)
    if n == 0:
        raise DomainError("cannot split an empty sample set")
    blocks = np.arange(n) // block_len
    unique = np.unique(blocks)
    rng = np.random.default_rng(seed)
    order = rng.permutation(unique)
    n_train_blocks = max(1, int(round(train_frac * len(unique))))
    train_blocks = set(order[:n_train_blocks].tolist())
    train_mask = np.isin(blocks, list(train_blocks))
    return np.where(train_mask)[0], np.where(~train_mask)[0]


def validation_tail(
    train_idx: np.ndarray, timestamps: np.ndarray, frac: float = 0.1
) -> tuple[np.ndarray, np.ndarray]:
    """Carve the temporally-last ``frac`` of the training split for early stopping."""
    order = train_idx[np.argsort(timestamps[train_idx], kind="stable")]
    n_val = max(1, int(round(frac * len(order))))
    if n_val >= len(order):
        raise DomainError("training split too small to carve validation from")
    return order[:-n_val], order[-n_val:]


def exclude_engagement_days(
    samples: SampleSet, engagement_windows: list[tuple[int, int]]
) -> SampleSet:
    """Drop samples whose base time falls on a day containing an engagement."""
    engaged_days = set()
    for start, end in engagement_windows:
        for day in range(start // MINUTES_PER_DAY, end // MINUTES_PER_DAY + 1):
            engaged_days.add(day)
    keep = np.array(
        [t // MINUTES_PER_DAY not in engaged_days for t in samples.timestamps]
    )
    return samples.subset(np.where(keep)[0])
