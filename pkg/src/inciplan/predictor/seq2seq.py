"""Encoder-decoder GRU with bilinear attention for multi-step speed forecasting."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from inciplan.domain import DomainError
from inciplan.ingest.pipeline import FeatureLayout
from inciplan.numerics import (
    Adam,
    GruStack,
    Tensor,
    clip_global_norm,
    concat,
    init_gru_stack,
    matmul,
    mse,
    mul,
    narrow,
    parameter,
    reshape,
    restore_params,
    softmax,
    tanh,
    tsum,
)
from inciplan.numerics.checkpoint import load_params, save_params
from inciplan.predictor.dataset import SampleSet, validation_tail

N_STATUS = 3


@dataclass
class TrainHistory:
    epochs: list[dict] = field(default_factory=list)
    best_epoch: int = -1
    forced_steps: int = 0
    free_steps: int = 0

    @property
    def forced_fraction(self) -> float:
        total = self.forced_steps + self.free_steps
        return self.forced_steps / total if total else 0.0


class Seq2SeqSpeedForecaster(BaseEstimator):
    """Sequence-to-sequence forecaster: lookback window in, 6 speed steps out.

    Follows the estimator convention (``fit`` / ``predict`` / ``get_params``)
    so it slots into model-selection tooling; inputs are scaled feature
    windows, outputs are scaled target-segment speeds.
    """

    def __init__(
        self,
        layout: FeatureLayout | None = None,
        n_targets: int = 1,
        hidden_size: int = 256,
        n_layers: int = 2,
        dropout: float = 0.2,
        head_size: int = 256,
        use_attention: bool = True,
        horizon: int = 6,
        lr: float = 0.0005,
        teacher_forcing: float = 0.5,
        batch_size: int = 32,
        max_epochs: int = 200,
        patience: int = 5,
        grad_clip: float = 5.0,
        seed: int = 0,
    ):
        self.layout = layout
        self.n_targets = n_targets
        self.hidden_size = hidden_size
        self.n_layers = n_layers
        self.dropout = dropout
        self.head_size = head_size
        self.use_attention = use_attention
        self.horizon = horizon
        self.lr = lr
        self.teacher_forcing = teacher_forcing
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.patience = patience
        self.grad_clip = grad_clip
        self.seed = seed

    # -- parameters ----------------------------------------------------------

    def _init_params(self, rng: np.random.Generator) -> None:
        if self.layout is None:
            raise DomainError("forecaster needs a FeatureLayout")
        bound = 1.0 / np.sqrt(self.hidden_size)
        self.encoder_ = init_gru_stack(
            self.layout.width, self.hidden_size, self.n_layers, rng, self.dropout
        )
        self.decoder_ = init_gru_stack(
            self.n_targets, self.hidden_size, self.n_layers, rng, self.dropout
        )
        if self.layout.use_incidents:
            self.embed_ = parameter(
                rng.uniform(-bound, bound, size=(N_STATUS, N_STATUS)), name="embed"
            )
        head_in = self.hidden_size * (2 if self.use_attention else 1)
        if self.use_attention:
            self.attn_ = parameter(
                rng.uniform(-bound, bound, size=(self.hidden_size, self.hidden_size)),
                name="attn",
            )
        self.head_w1_ = parameter(rng.uniform(-bound, bound, size=(head_in, self.head_size)))
        self.head_b1_ = parameter(np.zeros(self.head_size))
        self.head_w2_ = parameter(rng.uniform(-bound, bound, size=(self.head_size, self.n_targets)))
        self.head_b2_ = parameter(np.zeros(self.n_targets))

    def named_params(self) -> dict[str, Tensor]:
        params = {}
        params.update(self.encoder_.named("encoder"))
        params.update(self.decoder_.named("decoder"))
        if self.layout.use_incidents:
            params["embed"] = self.embed_
        if self.use_attention:
            params["attn"] = self.attn_
        params["head.w1"] = self.head_w1_
        params["head.b1"] = self.head_b1_
        params["head.w2"] = self.head_w2_
        params["head.b2"] = self.head_b2_
        return params

    def parameter_count(self) -> int:
        return sum(p.size for p in self.named_params().values())

    # -- forward pieces --------------------------------------------------------

    def _embed_frame(self, x: Tensor) -> Tensor:
        """Pass the incident one-hot block through the learned status embedding."""
        if not self.layout.use_incidents:
            return x
        lo, hi = self.layout.incident_start, self.layout.incident_end
        batch = x.shape[0]
        groups = self.layout.n_incident_groups
        parts = []
        if lo > 0:
            parts.append(narrow(x, 1, 0, lo))
        block = narrow(x, 1, lo, hi - lo)
        flat = reshape(block, (batch * groups, N_STATUS))
        embedded = reshape(matmul(flat, self.embed_), (batch, hi - lo))
        parts.append(embedded)
        if hi < self.layout.width:
            parts.append(narrow(x, 1, hi, self.layout.width - hi))
        return concat(parts, axis=1) if len(parts) > 1 else parts[0]

    def encode(
        self, windows: np.ndarray, train: bool = False, rng=None
    ) -> tuple[list[Tensor], list[Tensor]]:
        """Run the encoder over [B x T x width]; returns per-step top states
        and the final stacked state that seeds the decoder."""
        if windows.ndim != 3 or windows.shape[2] != self.layout.width:
            raise DomainError(
                f"encoder window shape {windows.shape} does not match feature width {self.layout.width}"
            )
        batch, steps, _ = windows.shape
        state = self.encoder_.initial_state(batch)
        tops: list[Tensor] = []
        for t in range(steps):
            x_t = self._embed_frame(Tensor(windows[:, t, :]))
            state = self.encoder_.step(x_t, state, train=train, rng=rng)
            tops.append(state[-1])
        return tops, state

    def attend(self, decoder_top: Tensor, encoder_tops: list[Tensor]) -> tuple[Tensor, Tensor]:
        """Bilinear attention: scores h_dec . W . h_enc, softmax, weighted sum."""
        if not encoder_tops:
            raise DomainError("attention requires at least one encoder state")
        query = matmul(decoder_top, self.attn_)
        scores = concat(
            [tsum(mul(query, enc), axis=1, keepdims=True) for enc in encoder_tops],
            axis=1,
        )
        weights = softmax(scores, axis=-1)
        context = None
        for j, enc in enumerate(encoder_tops):
            term = mul(narrow(weights, 1, j, 1), enc)
            context = term if context is None else context + term
        return context, weights

    def _head(self, decoder_top: Tensor, context: Tensor | None, y_prev: Tensor) -> Tensor:
        """Residual output: previous speeds plus a learned correction.

        The correction path is linear(tanh(linear(concat(h_dec, context)))).
        Anchoring on the fed-back speeds means an untrained model already
        matches persistence, and training only has to learn the dynamics.
        """
        z = concat([decoder_top, context], axis=1) if context is not None else decoder_top
        hidden = tanh(matmul(z, self.head_w1_) + self.head_b1_)
        return y_prev + matmul(hidden, self.head_w2_) + self.head_b2_

    def decode(
        self,
        initial_state: list[Tensor],
        y0: np.ndarray,
        encoder_tops: list[Tensor],
        teacher: np.ndarray | None = None,
        tf_ratio: float = 0.0,
        train: bool = False,
        rng: np.random.Generator | None = None,
        history: TrainHistory | None = None,
        input_log: list | None = None,
    ) -> list[Tensor]:
        """Autoregressive decoding; teacher forcing replaces the fed-back
        prediction with ground truth with probability ``tf_ratio`` per step."""
        if train and teacher is not None and teacher.shape[1] < self.horizon:
            raise DomainError(
                f"teacher sequence has {teacher.shape[1]} steps, need {self.horizon}"
            )
        state = initial_state
        y = Tensor(np.asarray(y0))
        outputs: list[Tensor] = []
        for step in range(self.horizon):
            if input_log is not None:
                input_log.append(np.array(y.data, copy=True))
            state = self.decoder_.step(y, state, train=train, rng=rng)
            context, _ = (
                self.attend(state[-1], encoder_tops) if self.use_attention else (None, None)
            )
            out = self._head(state[-1], context, y)
            outputs.append(out)
            if step + 1 == self.horizon:
                break
            force = (
                train
                and teacher is not None
                and rng is not None
                and rng.random() < tf_ratio
            )
            if force:
                y = Tensor(teacher[:, step, :])
            else:
                y = out  # gradients flow through the fed-back prediction
            if history is not None and train and teacher is not None:
                if force:
                    history.forced_steps += 1
                else:
                    history.free_steps += 1
        return outputs

    # -- training ---------------------------------------------------------------

    def _forward_loss(
        self, X, y0, Y, train: bool, rng=None, history: TrainHistory | None = None
    ) -> Tensor:
        tops, state = self.encode(X, train=train, rng=rng)
        outputs = self.decode(
            state,
            y0,
            tops,
            teacher=Y if train else None,
            tf_ratio=self.teacher_forcing if train else 0.0,
            train=train,
            rng=rng,
            history=history,
        )
        stacked = concat(outputs, axis=1)
        target = Tensor(np.asarray(Y).reshape(Y.shape[0], -1))
        return mse(stacked, target)

    def fit(self, samples: SampleSet, val_frac: float = 0.1) -> "Seq2SeqSpeedForecaster":
        """Train with Adam, early-stopping on a temporal validation tail."""
        if len(samples) == 0:
            raise DomainError("cannot train on an empty dataset")
        rng = np.random.default_rng(self.seed)
        self.n_targets = samples.y0.shape[1]
        self._init_params(rng)
        params = self.named_params()
        optimizer = Adam(params, lr=self.lr)
        all_idx = np.arange(len(samples))
        fit_idx, val_idx = validation_tail(all_idx, samples.timestamps, val_frac)
        history = TrainHistory()
        best_val = np.inf
        best_state: dict[str, np.ndarray] = {}
        stale = 0
        for epoch in range(self.max_epochs):
            order = rng.permutation(fit_idx)
            train_losses = []
            for start in range(0, len(order), self.batch_size):
                batch = order[start : start + self.batch_size]
                loss = self._forward_loss(
                    samples.X[batch], samples.y0[batch], samples.Y[batch],
                    train=True, rng=rng, history=history,
                )
                loss.backward()
                grads = {k: p.grad for k, p in params.items()}
                clip_global_norm(grads, self.grad_clip)
                optimizer.step(grads)
                train_losses.append(loss.item())
            val_loss = self._forward_loss(
                samples.X[val_idx], samples.y0[val_idx], samples.Y[val_idx], train=False
            ).item()
            history.epochs.append(
                {"epoch": epoch, "train_loss": float(np.mean(train_losses)), "val_loss": val_loss}
            )
            if val_loss < best_val:
                best_val = val_loss
                best_state = {k: p.data.copy() for k, p in params.items()}
                history.best_epoch = epoch
                stale = 0
            else:
                stale += 1
                if stale >= self.patience:
                    break
        for key, p in params.items():
            p.data = best_state[key]
        self.history_ = history
        return self

    def predict(self, X: np.ndarray, y0: np.ndarray) -> np.ndarray:
        """Scaled speed forecasts [B x horizon x targets]; eval mode only."""
        if not hasattr(self, "encoder_"):
            raise NotFittedError("forecaster is not fitted")
        tops, state = self.encode(np.asarray(X), train=False)
        outputs = self.decode(state, np.asarray(y0), tops)
        return np.stack([o.data for o in outputs], axis=1)

    # -- persistence --------------------------------------------------------------

    def save(self, path) -> None:
        meta = {
            "n_targets": self.n_targets,
            "hidden_size": self.hidden_size,
            "n_layers": self.n_layers,
            "dropout": self.dropout,
            "head_size": self.head_size,
            "use_attention": self.use_attention,
            "horizon": self.horizon,
            "layout": {
                "n_segments": self.layout.n_segments,
                "use_speed": self.layout.use_speed,
                "use_slowdown": self.layout.use_slowdown,
                "use_incidents": self.layout.use_incidents,
                "use_weather": self.layout.use_weather,
                "use_time": self.layout.use_time,
                "concat_segment_indices": list(self.layout.concat_segment_indices),
            },
        }
        save_params(path, self.named_params(), meta=meta)

    @classmethod
    def load(cls, path) -> "Seq2SeqSpeedForecaster":
        arrays, meta = load_params(path)
        layout_meta = meta.pop("layout")
        layout = FeatureLayout(
            n_segments=layout_meta["n_segments"],
            use_speed=layout_meta["use_speed"],
            use_slowdown=layout_meta["use_slowdown"],
            use_incidents=layout_meta["use_incidents"],
            use_weather=layout_meta["use_weather"],
            use_time=layout_meta["use_time"],
            concat_segment_indices=tuple(layout_meta["concat_segment_indices"]),
        )
        model = cls(layout=layout, **{k: v for k, v in meta.items() if k != "layout"})
        model._init_params(np.random.default_rng(0))
        restore_params(model.named_params(), arrays)
        return model
