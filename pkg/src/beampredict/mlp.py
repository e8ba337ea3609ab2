"""
Feed-forward network with sigmoid hidden layers and a linear output layer,
trained by full-batch gradient descent on an L2-regularized squared error.

Weights follow the (fan_out, fan_in) convention so layer ``l`` computes
``z = a_prev @ W.T + b`` on row-stacked batches.
"""

from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .errors import DimensionMismatch, DivergenceDetected, EmptyBatch

logger = logging.getLogger(__name__)


class StepSizeWarning(RuntimeWarning):
    """Training cost rose after warm-up; the learning rate may be too large."""


SIGMOID = "sigmoid"
LINEAR = "linear"


@dataclass(frozen=True)
class MlpArchitecture:
    layer_sizes: Tuple[int, ...] = (100, 50, 20, 10)
    hidden_activation: str = SIGMOID
    output_activation: str = LINEAR

    def __post_init__(self):
        object.__setattr__(self, "layer_sizes", tuple(int(n) for n in self.layer_sizes))
        if len(self.layer_sizes) < 3:
            raise ValueError("need an input, at least one hidden, and an output layer")
        if any(n < 1 for n in self.layer_sizes):
            raise ValueError("layer sizes must be positive")
        if self.hidden_activation != SIGMOID or self.output_activation != LINEAR:
            raise ValueError("only sigmoid hidden and linear output activations are supported")

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]


@dataclass
class MlpParams:
    weights: List[np.ndarray]
    biases: List[np.ndarray]

    @property
    def layer_sizes(self) -> Tuple[int, ...]:
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)

    def copy(self) -> "MlpParams":
        return MlpParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for pair in zip(self.weights, self.biases) for a in pair])

    def with_flat(self, vec: np.ndarray) -> "MlpParams":
        out, i = self.copy(), 0
        for arrs in zip(out.weights, out.biases):
            for a in arrs:
                a[...] = vec[i:i + a.size].reshape(a.shape)
                i += a.size
        return out


@dataclass(frozen=True)
class TrainConfig:
    lam: float = 1e-4
    learning_rate: float = 0.3
    max_iterations: int = 5000
    init_seed: int = 0
    convergence_tol: float = 1e-8
    momentum: float = 0.0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must lie in [0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d) -> "TrainConfig":
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        if "lambda" in d:
            known["lam"] = d["lambda"]
        return cls(**known)


@dataclass
class TrainResult:
    params: MlpParams
    cost_history: List[float]
    iterations: int
    converged: bool
    increases_after_warmup: int = 0


def sigmoid(z):
    # split by sign so exp never overflows
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def init_params(arch: MlpArchitecture, seed: int = 0) -> MlpParams:
    """Glorot-uniform weights, zero biases."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    sizes = arch.layer_sizes
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpParams(weights, biases)


def _as_batch(x, n_inputs: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != n_inputs:
        raise DimensionMismatch(f"expected inputs with {n_inputs} features, got shape {x.shape}")
    return x


def forward_activations(params: MlpParams, x) -> List[np.ndarray]:
    """Activations of every layer, input first, for a row-stacked batch."""
    a = _as_batch(x, params.weights[0].shape[1])
    acts = [a]
    last = len(params.weights) - 1
    for l, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w.T + b
        a = z if l == last else sigmoid(z)
        acts.append(a)
    return acts


def forward(params: MlpParams, x) -> np.ndarray:
    """Network output; a single vector in gives a single vector out."""
    out = forward_activations(params, x)[-1]
    return out[0] if np.ndim(x) == 1 else out


def _check_batch(params, x, y):
    x = _as_batch(x, params.weights[0].shape[1])
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[None, :]
    if len(x) == 0:
        raise EmptyBatch("cost needs at least one training pair")
    if y.shape != (len(x), params.weights[-1].shape[0]):
        raise DimensionMismatch(f"targets shape {y.shape} does not match outputs")
    return x, y


def weight_penalty(params: MlpParams) -> float:
    return float(sum(np.sum(w * w) for w in params.weights))


def cost(params: MlpParams, x, y, lam: float) -> float:
    """Mean squared error norm over the batch plus (lam/2) * sum ||W||_F^2."""
    x, y = _check_batch(params, x, y)
    err = forward_activations(params, x)[-1] - y
    return float(np.sum(err * err) / len(x) + 0.5 * lam * weight_penalty(params))


def cost_and_gradients(params: MlpParams, x, y, lam: float) -> Tuple[float, MlpParams]:
    """Cost and its exact gradient by backpropagation. Biases are unregularized."""
    x, y = _check_batch(params, x, y)
    n = len(x)
    acts = forward_activations(params, x)
    err = acts[-1] - y
    value = float(np.sum(err * err) / n + 0.5 * lam * weight_penalty(params))

    delta = 2.0 * err / n
    gw, gb = [None] * len(params.weights), [None] * len(params.weights)
    for l in range(len(params.weights) - 1, -1, -1):
        gw[l] = delta.T @ acts[l] + lam * params.weights[l]
        gb[l] = delta.sum(axis=0)
        if l > 0:
            a = acts[l]
            delta = (delta @ params.weights[l]) * a * (1.0 - a)
    return value, MlpParams(gw, gb)


def gradients(params: MlpParams, x, y, lam: float) -> MlpParams:
    return cost_and_gradients(params, x, y, lam)[1]


def train(arch: MlpArchitecture, x, y, config: TrainConfig = TrainConfig(),
          init: Optional[MlpParams] = None) -> TrainResult:
    """Full-batch gradient descent from a seeded initialization.

    Stops after ``max_iterations`` steps or once the relative change in cost
    falls below ``convergence_tol``. ``cost_history[i]`` is the cost before
    step ``i``; the final entry is the cost of the returned parameters.
    """
    params = init_params(arch, config.init_seed) if init is None else init.copy()
    x, y = _check_batch(params, x, y)
    history: List[float] = []
    velocity = None
    converged = False
    it = 0
    for it in range(1, config.max_iterations + 1):
        value, grad = cost_and_gradients(params, x, y, config.lam)
        if not math.isfinite(value):
            raise DivergenceDetected(
                f"cost became {value} at iteration {it}; learning rate {config.learning_rate} is too high"
            )
        if history and abs(history[-1] - value) <= config.convergence_tol * max(abs(history[-1]), 1e-300):
            history.append(value)
            converged = True
            break
        history.append(value)
        if config.momentum > 0:
            if velocity is None:
                velocity = [np.zeros_like(a) for a in grad.weights + grad.biases]
            for v, g in zip(velocity, grad.weights + grad.biases):
                v *= config.momentum
                v += g
            steps = velocity
        else:
            steps = grad.weights + grad.biases
        for p, g in zip(params.weights + params.biases, steps):
            p -= config.learning_rate * g
    if not converged:
        final = cost(params, x, y, config.lam)
        if not math.isfinite(final):
            raise DivergenceDetected("cost became non-finite after the last step")
        history.append(final)

    increases = int(np.sum(np.diff(history[10:]) > 0)) if len(history) > 11 else 0
    if increases:
        msg = f"cost increased on {increases} iterations after warm-up; consider a smaller learning rate"
        logger.info(msg)
        warnings.warn(msg, StepSizeWarning, stacklevel=2)
    return TrainResult(params, history, it, converged, increases)


def params_to_dict(arch: MlpArchitecture, params: MlpParams, meta: Optional[dict] = None) -> dict:
    return {
        "architecture": {
            "layer_sizes": list(arch.layer_sizes),
            "hidden_activation": arch.hidden_activation,
            "output_activation": arch.output_activation,
        },
        "weights": [w.tolist() for w in params.weights],
        "biases": [b.tolist() for b in params.biases],
        "training": meta or {},
    }


def params_from_dict(d) -> Tuple[MlpArchitecture, MlpParams, dict]:
    a = d["architecture"]
    arch = MlpArchitecture(tuple(a["layer_sizes"]), a.get("hidden_activation", SIGMOID),
                           a.get("output_activation", LINEAR))
    params = MlpParams([np.array(w, dtype=float).reshape(o, i) for w, o, i in
                        zip(d["weights"], arch.layer_sizes[1:], arch.layer_sizes[:-1])],
                       [np.array(b, dtype=float) for b in d["biases"]])
    if params.layer_sizes != arch.layer_sizes:
        raise DimensionMismatch("stored weights do not match the stored architecture")
    return arch, params, d.get("training", {})


def save_model(path, arch: MlpArchitecture, params: MlpParams, meta: Optional[dict] = None) -> None:
    Path(path).write_text(json.dumps(params_to_dict(arch, params, meta), sort_keys=True) + "\n")


def load_model(path):
    return params_from_dict(json.loads(Path(path).read_text()))
