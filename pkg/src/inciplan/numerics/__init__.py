from inciplan.numerics.checkpoint import load_params, restore_params, save_params
from inciplan.numerics.gru import (
    GruLayerParams,
    GruStack,
    gru_step,
    init_gru_layer,
    init_gru_stack,
)
from inciplan.numerics.optim import Adam, clip_global_norm, global_grad_norm
from inciplan.numerics.tensor import (
    NumericsError,
    Tensor,
    add,
    concat,
    dropout,
    gradients,
    matmul,
    mean,
    mse,
    mul,
    narrow,
    parameter,
    reshape,
    sigmoid,
    softmax,
    square,
    sub,
    tanh,
    tsum,
)

__all__ = [
    "Adam",
    "GruLayerParams",
    "GruStack",
    "NumericsError",
    "Tensor",
    "add",
    "clip_global_norm",
    "concat",
    "dropout",
    "global_grad_norm",
    "gradients",
    "gru_step",
    "init_gru_layer",
    "init_gru_stack",
    "load_params",
    "matmul",
    "mean",
    "mse",
    "mul",
    "narrow",
    "parameter",
    "reshape",
    "restore_params",
    "save_params",
    "sigmoid",
    "softmax",
    "square",
    "sub",
    "tanh",
    "tsum",
]
