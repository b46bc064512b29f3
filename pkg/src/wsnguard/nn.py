"""Neighbor-driven feedforward neural predictor.

Hidden layers use tanh, the single output neuron is linear. Training is a
from-scratch Levenberg-Marquardt loop over all weights and biases with the
residual Jacobian computed by backpropagation. Inputs and targets are scaled
to [-1, 1] with an affine per-feature transform stored alongside the weights.
"""

import io
import zipfile
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .errors import (ConfigurationError, DimensionError, FormatError,
                     NumericInputError, TopologyError, TrainingError)

NET_FORMAT_VERSION = 1

# Damping factor ceiling: if no step is accepted before mu reaches this, the
# loop stops (or raises if the damped system is singular even here).
_MU_MAX = 1e12


# ---------------------------------------------------------------------------
# plain-array network primitives (testable without the estimator wrapper)
# ---------------------------------------------------------------------------

def init_layers(layer_sizes, rng):
    """Uniform [-1/sqrt(fan_in), 1/sqrt(fan_in)] weight/bias initialization."""
    weights, biases = [], []
    for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = 1.0 / np.sqrt(n_in)
        weights.append(rng.uniform(-bound, bound, size=(n_out, n_in)))
        biases.append(rng.uniform(-bound, bound, size=n_out))
    return weights, biases


def forward(weights, biases, X):
    """Batched forward pass; returns (S,) outputs in the net's own scale."""
    a = np.atleast_2d(np.asarray(X, dtype=float))
    if a.shape[1] != weights[0].shape[1]:
        raise DimensionError(
            f"input size {a.shape[1]} does not match net input {weights[0].shape[1]}")
    if not np.all(np.isfinite(a)):
        raise NumericInputError("non-finite network input")
    last = len(weights) - 1
    for i, (W, b) in enumerate(zip(weights, biases)):
        a = a @ W.T + b
        if i != last:
            a = np.tanh(a)
    return a[:, 0]


def jacobian(weights, biases, X):
    """Jacobian of the scalar output w.r.t. all parameters, one row per sample.

    Column order matches pack_params: W0, b0, W1, b1, ... (row-major W).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    S = X.shape[0]
    activations = [X]
    a = X
    last = len(weights) - 1
    for i, (W, b) in enumerate(zip(weights, biases)):
        a = a @ W.T + b
        if i != last:
            a = np.tanh(a)
        activations.append(a)

    cols = [None] * len(weights)
    delta = np.ones((S, 1))  # d(out)/d(out), linear output layer
    for l in range(last, -1, -1):
        a_prev = activations[l]
        gw = np.einsum("so,si->soi", delta, a_prev).reshape(S, -1)
        cols[l] = np.hstack([gw, delta])
        if l > 0:
            delta = (delta @ weights[l]) * (1.0 - activations[l] ** 2)
    return np.hstack(cols)


def pack_params(weights, biases):
    return np.concatenate([np.concatenate([W.ravel(), b])
                           for W, b in zip(weights, biases)])


def unpack_params(theta, layer_sizes):
    weights, biases = [], []
    pos = 0
    for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        weights.append(theta[pos:pos + n_out * n_in].reshape(n_out, n_in))
        pos += n_out * n_in
        biases.append(theta[pos:pos + n_out])
        pos += n_out
    return weights, biases


@dataclass
class TrainingReport:
    epochs: int = 0
    loss_curve: list = field(default_factory=list)  # SSE after each accepted step
    final_loss: float = np.inf
    grad_norm: float = np.inf
    rmse: float = np.inf
    stop_reason: str = "not-trained"


def lm_fit(layer_sizes, X, y, mu_init=1e-3, mu_increase=10.0, mu_decrease=0.1,
           max_epochs=200, grad_tol=1e-8, loss_tol=1e-9, seed=0,
           weights=None, biases=None):
    """Levenberg-Marquardt least-squares fit of the network to (X, y).

    Damped Gauss-Newton: solve (J'J + mu*I) delta = -J'r, accept the step only
    if the loss decreases. When the parameter count exceeds the sample count
    the equivalent dual system (JJ' + mu*I) is solved instead.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.shape[0]:
        raise DimensionError("inputs and targets disagree on sample count")
    if X.shape[0] == 0:
        raise ConfigurationError("empty training set")
    if weights is None:
        rng = np.random.default_rng(seed)
        weights, biases = init_layers(layer_sizes, rng)

    theta = pack_params(weights, biases)
    r = forward(weights, biases, X) - y
    loss = float(r @ r)
    mu = float(mu_init)
    report = TrainingReport(loss_curve=[loss], final_loss=loss)
    if not np.isfinite(loss):
        raise TrainingError("non-finite initial loss", report)

    epochs = 0
    stop = "max-epochs"
    while epochs < max_epochs:
        J = jacobian(weights, biases, X)
        g = J.T @ r
        report.grad_norm = float(np.max(np.abs(g)))
        if report.grad_norm < grad_tol:
            stop = "grad-tol"
            break
        S, P = J.shape
        JJt = J @ J.T if P > S else None
        JtJ = J.T @ J if P <= S else None
        accepted = False
        while True:
            try:
                if P > S:
                    delta = -J.T @ np.linalg.solve(JJt + mu * np.eye(S), r)
                else:
                    delta = np.linalg.solve(JtJ + mu * np.eye(P), -g)
            except np.linalg.LinAlgError:
                if mu >= _MU_MAX:
                    raise TrainingError("singular damped normal matrix", report)
                mu *= mu_increase
                continue
            theta_new = theta + delta
            w_new, b_new = unpack_params(theta_new, layer_sizes)
            r_new = forward(w_new, b_new, X) - y
            loss_new = float(r_new @ r_new)
            if np.isfinite(loss_new) and loss_new < loss:
                accepted = True
                theta, weights, biases = theta_new, w_new, b_new
                r, prev_loss, loss = r_new, loss, loss_new
                mu = max(mu * mu_decrease, 1e-20)
                break
            if mu >= _MU_MAX:
                break
            mu *= mu_increase
        epochs += 1
        if not accepted:
            stop = "mu-overflow"
            break
        report.loss_curve.append(loss)
        if prev_loss > 0 and (prev_loss - loss) / prev_loss < loss_tol:
            stop = "loss-tol"
            break

    report.epochs = epochs
    report.final_loss = loss
    report.rmse = float(np.sqrt(loss / len(y)))
    report.stop_reason = stop
    return weights, biases, report


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

@dataclass
class Normalization:
    """Invertible per-feature affine map onto [-1, 1]."""

    x_mid: np.ndarray
    x_half: np.ndarray
    y_mid: float
    y_half: float

    @classmethod
    def from_data(cls, X, y):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).ravel()
        lo, hi = X.min(axis=0), X.max(axis=0)
        x_mid = (hi + lo) / 2.0
        x_half = np.where(hi > lo, (hi - lo) / 2.0, 1.0)
        y_lo, y_hi = float(y.min()), float(y.max())
        y_mid = (y_hi + y_lo) / 2.0
        y_half = (y_hi - y_lo) / 2.0 if y_hi > y_lo else 1.0
        return cls(x_mid, x_half, y_mid, y_half)

    def normalize_x(self, X):
        return (np.asarray(X, dtype=float) - self.x_mid) / self.x_half

    def normalize_y(self, y):
        return (np.asarray(y, dtype=float) - self.y_mid) / self.y_half

    def denormalize_y(self, y):
        return np.asarray(y, dtype=float) * self.y_half + self.y_mid


# ---------------------------------------------------------------------------
# neighbor windows
# ---------------------------------------------------------------------------

@dataclass
class NeighborWindow:
    """m x n readings of a node's neighbors; column j holds instant t-j."""

    values: np.ndarray
    neighbor_ids: tuple = None

    def flatten(self):
        """Neighbor-major, newest-first flattening (the training layout)."""
        return np.asarray(self.values, dtype=float).reshape(-1)


def absolute_error(measured, predicted):
    """|measured - predicted|, the neural channel error."""
    if not (np.isfinite(measured) and np.isfinite(predicted)):
        raise NumericInputError("non-finite value in error computation")
    return abs(float(measured) - float(predicted))


# ---------------------------------------------------------------------------
# estimator wrapper
# ---------------------------------------------------------------------------

class NeuralNetPredictor(BaseEstimator, RegressorMixin):
    """LM-trained tanh/linear regressor predicting one node from its neighbors.

    The input layer size must equal neighbor_count * window length; the
    default hidden sizes (48, 24) with 8 neighbors over 3 instants give the
    24-48-24-1 stack used by the bundled scenarios.
    """

    def __init__(self, hidden_sizes=(48, 24), mu_init=1e-3, mu_increase=10.0,
                 mu_decrease=0.1, max_epochs=200, grad_tol=1e-8, loss_tol=1e-9,
                 seed=0, max_params=5000):
        self.hidden_sizes = hidden_sizes
        self.mu_init = mu_init
        self.mu_increase = mu_increase
        self.mu_decrease = mu_decrease
        self.max_epochs = max_epochs
        self.grad_tol = grad_tol
        self.loss_tol = loss_tol
        self.seed = seed
        self.max_params = max_params

    def _validate_params(self):
        if self.mu_init <= 0 or self.mu_increase <= 1 or not (0 < self.mu_decrease < 1):
            raise ConfigurationError("invalid damping parameters")
        if self.max_epochs < 0 or self.grad_tol <= 0 or self.loss_tol <= 0:
            raise ConfigurationError("invalid stopping parameters")
        if any(int(h) < 1 for h in self.hidden_sizes):
            raise ConfigurationError("hidden layer sizes must be positive")

    def fit(self, X, y, neighbor_ids=None, window_shape=None):
        """Train on flattened neighbor windows X (S x input) and targets y."""
        self._validate_params()
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).ravel()
        if X.shape[0] == 0:
            raise ConfigurationError("empty training set")
        self.layer_sizes_ = [X.shape[1], *map(int, self.hidden_sizes), 1]
        n_params = sum(n_out * (n_in + 1) for n_in, n_out
                       in zip(self.layer_sizes_[:-1], self.layer_sizes_[1:]))
        if n_params > self.max_params:
            raise ConfigurationError(
                f"{n_params} parameters exceed the cap of {self.max_params}")
        self.norm_ = Normalization.from_data(X, y)
        self.neighbor_ids_ = tuple(neighbor_ids) if neighbor_ids is not None else None
        self.window_shape_ = tuple(window_shape) if window_shape is not None else None
        self.weights_, self.biases_, self.report_ = lm_fit(
            self.layer_sizes_, self.norm_.normalize_x(X), self.norm_.normalize_y(y),
            mu_init=self.mu_init, mu_increase=self.mu_increase,
            mu_decrease=self.mu_decrease, max_epochs=self.max_epochs,
            grad_tol=self.grad_tol, loss_tol=self.loss_tol, seed=self.seed)
        # loss/rmse are in normalized units; report physical RMSE instead
        resid = self.predict(X) - y
        self.report_.rmse = float(np.sqrt(np.mean(resid ** 2)))
        return self

    def predict(self, X):
        """Physical-unit predictions for flattened windows (S x input)."""
        out = forward(self.weights_, self.biases_, self.norm_.normalize_x(X))
        return self.norm_.denormalize_y(out)

    def predict_window(self, window):
        """Predict one reading from a NeighborWindow; returns a scalar."""
        values = np.atleast_2d(np.asarray(window.values, dtype=float))
        if values.size != self.layer_sizes_[0]:
            raise DimensionError(
                f"window size {values.shape} does not match input layer "
                f"({self.layer_sizes_[0]} neurons)")
        if self.window_shape_ is not None and values.shape != self.window_shape_:
            raise DimensionError(
                f"window shape {values.shape} != trained shape {self.window_shape_}")
        if (window.neighbor_ids is not None and self.neighbor_ids_ is not None
                and tuple(window.neighbor_ids) != self.neighbor_ids_):
            raise TopologyError("neighbor ids differ from the training order")
        return float(self.predict(window.flatten()[None, :])[0])

    # -- serialization ---------------------------------------------------

    def save_bytes(self):
        """Versioned container with layout, normalization and all parameters."""
        buf = io.BytesIO()
        payload = {
            "format_version": np.array([NET_FORMAT_VERSION]),
            "layer_sizes": np.array(self.layer_sizes_),
            "x_mid": self.norm_.x_mid, "x_half": self.norm_.x_half,
            "y_mid": np.array([self.norm_.y_mid]),
            "y_half": np.array([self.norm_.y_half]),
            "neighbor_ids": np.array(self.neighbor_ids_ if self.neighbor_ids_ else [],
                                     dtype=np.int64),
            "window_shape": np.array(self.window_shape_ if self.window_shape_ else [],
                                     dtype=np.int64),
        }
        for i, (W, b) in enumerate(zip(self.weights_, self.biases_)):
            payload[f"W{i}"] = W
            payload[f"b{i}"] = b
        np.savez(buf, **payload)
        return buf.getvalue()

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(self.save_bytes())

    @classmethod
    def from_bytes(cls, data):
        try:
            with np.load(io.BytesIO(data)) as arc:
                version = int(arc["format_version"][0])
                if version != NET_FORMAT_VERSION:
                    raise FormatError(f"unsupported net format version {version}")
                layer_sizes = [int(v) for v in arc["layer_sizes"]]
                net = cls(hidden_sizes=tuple(layer_sizes[1:-1]))
                net.layer_sizes_ = layer_sizes
                net.weights_ = [arc[f"W{i}"] for i in range(len(layer_sizes) - 1)]
                net.biases_ = [arc[f"b{i}"] for i in range(len(layer_sizes) - 1)]
                net.norm_ = Normalization(arc["x_mid"], arc["x_half"],
                                          float(arc["y_mid"][0]),
                                          float(arc["y_half"][0]))
                ids = arc["neighbor_ids"]
                net.neighbor_ids_ = tuple(int(v) for v in ids) if ids.size else None
                shape = arc["window_shape"]
                net.window_shape_ = tuple(int(v) for v in shape) if shape.size else None
                return net
        except FormatError:
            raise
        except (zipfile.BadZipFile, KeyError, ValueError, OSError) as exc:
            raise FormatError(f"corrupt net file: {exc}") from exc

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())
