"""Minimal dense tensor engine: hand-written forward/backward, SGD, gradcheck."""

from .gradcheck import grad_check
from .optim import NonFiniteGradient, sgd_step
from .ops import (
    LstmCellParams,
    addn,
    affine,
    avgpool_time,
    bilstm_forward,
    concat_cols,
    concat_vec,
    dropout,
    embed_lookup,
    flip_rows,
    glorot,
    init_lstm_params,
    lstm_cell,
    lstm_run,
    maxpool_time,
    row,
    scale,
    softmax_xent,
    softmax_xent_rows,
)
from .rng import RngState
from .tensor import Tensor, no_grad

__all__ = [
    "LstmCellParams",
    "NonFiniteGradient",
    "RngState",
    "Tensor",
    "addn",
    "affine",
    "avgpool_time",
    "bilstm_forward",
    "concat_cols",
    "concat_vec",
    "dropout",
    "embed_lookup",
    "flip_rows",
    "glorot",
    "grad_check",
    "init_lstm_params",
    "lstm_cell",
    "lstm_run",
    "maxpool_time",
    "no_grad",
    "row",
    "scale",
    "sgd_step",
    "softmax_xent",
    "softmax_xent_rows",
]
