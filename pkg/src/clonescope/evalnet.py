"""Feed-forward regression network predicting classifier loss from a
hyperparameter point.

Two tanh hidden layers of width 64, scalar output, trained on mean
squared error by full-batch Adam with decoupled weight decay.  Weights
start at half the usual 1/sqrt(fan-in) scale; the fit must generalise
from a few hundred samples, so the initial function is kept smooth.
Gradients are computed by hand so they can be checked against central
finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_HIDDEN = 64
_INIT_SCALE = 0.5

_PARAM_NAMES = ("w1", "b1", "w2", "b2", "w3", "b3")


@dataclass
class EvalNet:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray
    steps: int = 0
    learning_rate: float = 1e-3
    weight_decay: float = 0.03
    # Training standardises targets for conditioning; predictions are
    # mapped back through these.
    target_shift: float = 0.0
    target_scale: float = 1.0

    @classmethod
    def create(cls, input_dim: int = 7, hidden: int = _HIDDEN, seed: int = 0) -> "EvalNet":
        rng = np.random.default_rng(seed)
        return cls(
            w1=rng.normal(0.0, _INIT_SCALE / np.sqrt(input_dim), size=(input_dim, hidden)),
            b1=np.zeros(hidden),
            w2=rng.normal(0.0, _INIT_SCALE / np.sqrt(hidden), size=(hidden, hidden)),
            b2=np.zeros(hidden),
            w3=rng.normal(0.0, _INIT_SCALE / np.sqrt(hidden), size=(hidden, 1)),
            b3=np.zeros(1),
        )

    def raw_forward(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        h1 = np.tanh(X @ self.w1 + self.b1)
        h2 = np.tanh(h1 @ self.w2 + self.b2)
        return (h2 @ self.w3 + self.b3)[:, 0]

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.raw_forward(X) * self.target_scale + self.target_shift

    def loss(self, X: np.ndarray, y: np.ndarray) -> float:
        residual = self.raw_forward(X) - np.asarray(y, dtype=np.float64)
        return float(np.mean(residual ** 2))

    def loss_and_grads(self, X: np.ndarray, y: np.ndarray) -> tuple[float, dict[str, np.ndarray]]:
        """MSE and its gradient with respect to every parameter tensor."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        y = np.asarray(y, dtype=np.float64)
        n = len(X)

        z1 = X @ self.w1 + self.b1
        h1 = np.tanh(z1)
        z2 = h1 @ self.w2 + self.b2
        h2 = np.tanh(z2)
        out = (h2 @ self.w3 + self.b3)[:, 0]  # raw (unscaled) output

        residual = out - y
        loss = float(np.mean(residual ** 2))

        d_out = (2.0 / n) * residual[:, None]
        grads = {
            "w3": h2.T @ d_out,
            "b3": d_out.sum(axis=0),
        }
        d_h2 = d_out @ self.w3.T
        d_z2 = d_h2 * (1.0 - h2 ** 2)
        grads["w2"] = h1.T @ d_z2
        grads["b2"] = d_z2.sum(axis=0)
        d_h1 = d_z2 @ self.w2.T
        d_z1 = d_h1 * (1.0 - h1 ** 2)
        grads["w1"] = X.T @ d_z1
        grads["b1"] = d_z1.sum(axis=0)
        return loss, grads


def numerical_gradient(
    net: EvalNet,
    X: np.ndarray,
    y: np.ndarray,
    param: str,
    index: tuple[int, ...],
    step: float = 1e-5,
) -> float:
    """Central finite difference of the MSE with respect to one weight."""
    tensor = getattr(net, param)
    original = tensor[index]
    tensor[index] = original + step
    plus = net.loss(X, y)
    tensor[index] = original - step
    minus = net.loss(X, y)
    tensor[index] = original
    return (plus - minus) / (2.0 * step)


def train_eval_net(
    net: EvalNet,
    samples: list[tuple[np.ndarray, float]],
    epochs: int = 2000,
    seed: int = 0,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> EvalNet:
    """Fit the network to (point, loss) samples.

    Full-batch Adam with decoupled weight decay on the weight matrices
    (biases are not decayed).  Targets are standardised for the duration
    of training; the inverse map is stored on the network.  Training is
    deterministic for a fixed starting state; the seed parameter is kept
    for call sites that derive the initial weights from it.
    """
    if len(samples) < 2:
        raise ValueError("need at least two samples to fit the evaluation network")
    X = np.asarray([point for point, _ in samples], dtype=np.float64)
    y = np.asarray([target for _, target in samples], dtype=np.float64)

    net.target_shift = float(y.mean())
    spread = float(y.std())
    net.target_scale = spread if spread > 1e-12 else 1.0
    y_std = (y - net.target_shift) / net.target_scale

    first = {name: np.zeros_like(getattr(net, name)) for name in _PARAM_NAMES}
    second = {name: np.zeros_like(getattr(net, name)) for name in _PARAM_NAMES}
    for step in range(1, epochs + 1):
        _, grads = net.loss_and_grads(X, y_std)
        for name in _PARAM_NAMES:
            first[name] = beta1 * first[name] + (1.0 - beta1) * grads[name]
            second[name] = beta2 * second[name] + (1.0 - beta2) * grads[name] ** 2
            mean_hat = first[name] / (1.0 - beta1 ** step)
            var_hat = second[name] / (1.0 - beta2 ** step)
            update = net.learning_rate * mean_hat / (np.sqrt(var_hat) + eps)
            if name.startswith("w"):
                update = update + net.learning_rate * net.weight_decay * getattr(net, name)
            setattr(net, name, getattr(net, name) - update)
        net.steps += 1
    return net
