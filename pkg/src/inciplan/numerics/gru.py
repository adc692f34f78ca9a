"""GRU cell and stacked-layer step on the autodiff tape."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from inciplan.numerics.tensor import (
    NumericsError,
    Tensor,
    dropout,
    matmul,
    mul,
    parameter,
    sigmoid,
    sub,
    tanh,
)


@dataclass
class GruLayerParams:
    """One layer's gate weights: input (w_*), recurrent (u_*), bias (b_*)."""

    w_z: Tensor
    u_z: Tensor
    b_z: Tensor
    w_r: Tensor
    u_r: Tensor
    b_r: Tensor
    w_c: Tensor
    u_c: Tensor
    b_c: Tensor

    def named(self, prefix: str) -> dict[str, Tensor]:
        return {
            f"{prefix}.{field}": getattr(self, field)
            for field in ("w_z", "u_z", "b_z", "w_r", "u_r", "b_r", "w_c", "u_c", "b_c")
        }

    @property
    def hidden_size(self) -> int:
        return self.u_z.shape[0]

    @property
    def input_size(self) -> int:
        return self.w_z.shape[0]


def init_gru_layer(input_size: int, hidden_size: int, rng: np.random.Generator) -> GruLayerParams:
    """Uniform(-1/sqrt(hidden), 1/sqrt(hidden)) matrices, zero biases."""
    bound = 1.0 / np.sqrt(hidden_size)

    def w(rows, cols):
        return parameter(rng.uniform(-bound, bound, size=(rows, cols)))

    def b():
        return parameter(np.zeros(hidden_size))

    return GruLayerParams(
        w_z=w(input_size, hidden_size), u_z=w(hidden_size, hidden_size), b_z=b(),
        w_r=w(input_size, hidden_size), u_r=w(hidden_size, hidden_size), b_r=b(),
        w_c=w(input_size, hidden_size), u_c=w(hidden_size, hidden_size), b_c=b(),
    )


def gru_step(params: GruLayerParams, x_t: Tensor, h_prev: Tensor) -> Tensor:
    """One GRU update: h = (1 - z) * h_prev + z * candidate."""
    if x_t.shape[-1] != params.input_size:
        raise NumericsError(
            f"gru input width {x_t.shape} does not match weights {params.w_z.shape}"
        )
    if h_prev.shape[-1] != params.hidden_size:
        raise NumericsError(
            f"gru hidden width {h_prev.shape} does not match weights {params.u_z.shape}"
        )
    z = sigmoid(matmul(x_t, params.w_z) + matmul(h_prev, params.u_z) + params.b_z)
    r = sigmoid(matmul(x_t, params.w_r) + matmul(h_prev, params.u_r) + params.b_r)
    candidate = tanh(
        matmul(x_t, params.w_c) + matmul(mul(r, h_prev), params.u_c) + params.b_c
    )
    return mul(sub(Tensor(1.0), z), h_prev) + mul(z, candidate)


@dataclass
class GruStack:
    """Stacked GRU layers with between-layer dropout during training."""

    layers: list[GruLayerParams]
    dropout_p: float = 0.0

    @property
    def hidden_size(self) -> int:
        return self.layers[0].hidden_size

    def initial_state(self, batch: int) -> list[Tensor]:
        return [Tensor(np.zeros((batch, layer.hidden_size))) for layer in self.layers]

    def step(
        self,
        x_t: Tensor,
        state: list[Tensor],
        train: bool = False,
        rng: np.random.Generator | None = None,
    ) -> list[Tensor]:
        """Advance every layer one step; returns the new per-layer states."""
        if len(state) != len(self.layers):
            raise NumericsError("state count does not match layer count")
        new_state = []
        inp = x_t
        for i, (layer, h_prev) in enumerate(zip(self.layers, state)):
            h = gru_step(layer, inp, h_prev)
            new_state.append(h)
            inp = h
            if i + 1 < len(self.layers):
                inp = dropout(inp, self.dropout_p, train, rng)
        return new_state

    def named(self, prefix: str) -> dict[str, Tensor]:
        out: dict[str, Tensor] = {}
        for i, layer in enumerate(self.layers):
            out.update(layer.named(f"{prefix}.layer{i}"))
        return out


def init_gru_stack(
    input_size: int,
    hidden_size: int,
    n_layers: int,
    rng: np.random.Generator,
    dropout_p: float = 0.0,
) -> GruStack:
    layers = [
        init_gru_layer(input_size if i == 0 else hidden_size, hidden_size, rng)
        for i in range(n_layers)
    ]
    return GruStack(layers=layers, dropout_p=dropout_p)
