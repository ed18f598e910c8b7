"""Parametric score models with flat parameter vectors and analytic gradients.

Two families:

* ``GaussianBasisLinear`` -- linear in Gaussian kernel features placed on a
  set of centers (typically the unlabeled training points).  In ratio mode
  the raw output is clamped at zero with a zero subgradient below the clamp.
* ``MLP`` -- fully connected ReLU network with a softplus output in ratio
  mode, trained by manual backpropagation.  No autodiff framework involved.

Both expose the same surface: ``predict`` (nonnegative in ratio mode),
``predict_grad`` for a single point, and ``grad_dot(X, w)`` which returns
sum_i w_i * d r(x_i) / d theta in one backward pass.  ``grad_dot`` is the
primitive the training loops consume.

Models serialize to plain JSON documents and round-trip bit-exactly.
"""

from __future__ import annotations

import json

import numpy as np
from scipy.special import expit

from .errors import ConfigError, DataError

__all__ = [
    "RatioModel",
    "GaussianBasisLinear",
    "MLP",
    "gaussian_basis_linear",
    "mlp",
    "save_model",
    "load_model",
    "model_from_dict",
]


class RatioModel:
    """Common interface for parametric score models."""

    kind = "abstract"

    @property
    def params(self) -> np.ndarray:
        raise NotImplementedError

    @params.setter
    def params(self, value):
        raise NotImplementedError

    @property
    def n_params(self) -> int:
        return self.params.size

    def predict(self, X) -> np.ndarray:
        raise NotImplementedError

    def grad_dot(self, X, weights) -> np.ndarray:
        raise NotImplementedError

    def predict_grad(self, x):
        """Value and parameter gradient at a single input point."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[0] != 1:
            raise ValueError("predict_grad takes a single point")
        value = self.predict(x)[0]
        grad = self.grad_dot(x, np.ones(1))
        return float(value), grad

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _check_dim(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim_in:
            raise ValueError(f"expected inputs of dimension {self.dim_in}, got {X.shape[1]}")
        return X


class GaussianBasisLinear(RatioModel):
    """Linear model over Gaussian basis functions exp(-||x - c||^2 / (2 bw^2)).

    With ``clamp=True`` (ratio mode) the output is max(0, w . phi(x)) and the
    gradient is zero wherever the raw output is negative.  ``clamp=False``
    gives a plain real-valued decision function for the PU baselines.
    """

    kind = "gaussian_basis_linear"

    def __init__(self, centers, bandwidth: float = 1.0, clamp: bool = True, weights=None):
        centers = np.atleast_2d(np.asarray(centers, dtype=float))
        if centers.shape[0] == 0:
            raise ConfigError("at least one basis center is required")
        if not (bandwidth > 0):
            raise ConfigError(f"bandwidth must be positive, got {bandwidth}")
        self.centers = centers
        self.bandwidth = float(bandwidth)
        self.clamp = bool(clamp)
        self.dim_in = centers.shape[1]
        if weights is None:
            self._w = np.zeros(centers.shape[0])
        else:
            self._w = np.asarray(weights, dtype=float).copy()
            if self._w.shape != (centers.shape[0],):
                raise ConfigError("weights length must match the number of centers")

    @property
    def params(self) -> np.ndarray:
        return self._w

    @params.setter
    def params(self, value):
        value = np.asarray(value, dtype=float)
        if value.shape != self._w.shape:
            raise ValueError(f"parameter vector must have shape {self._w.shape}")
        self._w = value.copy()

    def features(self, X) -> np.ndarray:
        X = self._check_dim(X)
        sq = (
            np.sum(X * X, axis=1)[:, None]
            - 2.0 * X @ self.centers.T
            + np.sum(self.centers * self.centers, axis=1)[None, :]
        )
        return np.exp(-sq / (2.0 * self.bandwidth**2))

    def raw(self, X) -> np.ndarray:
        return self.features(X) @ self._w

    def predict(self, X) -> np.ndarray:
        raw = self.raw(X)
        return np.maximum(raw, 0.0) if self.clamp else raw

    def grad_dot(self, X, weights) -> np.ndarray:
        return self.grad_dot_features(self.features(X), weights)

    # Feature-cache protocol: the training loop evaluates the same rows every
    # epoch, and the kernel expansion dominates the cost, so it precomputes
    # the feature matrix once and works on row slices.
    def feature_cache(self, X) -> np.ndarray:
        return self.features(X)

    def predict_features(self, phi) -> np.ndarray:
        raw = phi @ self._w
        return np.maximum(raw, 0.0) if self.clamp else raw

    def grad_dot_features(self, phi, weights) -> np.ndarray:
        w = np.asarray(weights, dtype=float)
        if self.clamp:
            w = w * (phi @ self._w >= 0)
        return phi.T @ w

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "dim_in": self.dim_in,
            "bandwidth": self.bandwidth,
            "clamp": self.clamp,
            "centers": self.centers.tolist(),
            "params": self._w.tolist(),
        }


class MLP(RatioModel):
    """Fully connected network, ReLU hidden layers, width-1 output.

    ``output="softplus"`` keeps predictions nonnegative for ratio models;
    ``output="linear"`` yields a real-valued decision function.  Weights are
    He-uniform initialized from the given seed, biases start at zero.
    """

    kind = "mlp"

    def __init__(self, layer_sizes, seed: int = 0, output: str = "softplus", params=None):
        layer_sizes = [int(s) for s in layer_sizes]
        if len(layer_sizes) < 2:
            raise ConfigError("layer_sizes needs at least input and output entries")
        if any(s <= 0 for s in layer_sizes):
            raise ConfigError("layer sizes must be positive")
        if layer_sizes[-1] != 1:
            raise ConfigError(f"output width must be 1, got {layer_sizes[-1]}")
        if output not in ("softplus", "linear"):
            raise ConfigError(f"unknown output mode {output!r}")
        self.layer_sizes = layer_sizes
        self.output = output
        self.seed = int(seed)
        self.dim_in = layer_sizes[0]
        self._shapes = [
            (layer_sizes[i + 1], layer_sizes[i]) for i in range(len(layer_sizes) - 1)
        ]
        if params is None:
            self._theta = self._init_params()
        else:
            self._theta = np.asarray(params, dtype=float).copy()
            if self._theta.shape != (self._expected_size(),):
                raise ConfigError("parameter vector does not match the architecture")

    def _expected_size(self) -> int:
        return sum(o * i + o for o, i in self._shapes)

    def _init_params(self) -> np.ndarray:
        rng = np.random.Generator(np.random.Philox(self.seed))
        chunks = []
        for out_dim, in_dim in self._shapes:
            bound = np.sqrt(6.0 / in_dim)
            chunks.append(rng.uniform(-bound, bound, size=out_dim * in_dim))
            chunks.append(np.zeros(out_dim))
        return np.concatenate(chunks)

    def _layers(self, theta):
        """Views of (W, b) per layer into the flat vector."""
        out = []
        k = 0
        for out_dim, in_dim in self._shapes:
            W = theta[k : k + out_dim * in_dim].reshape(out_dim, in_dim)
            k += out_dim * in_dim
            b = theta[k : k + out_dim]
            k += out_dim
            out.append((W, b))
        return out

    @property
    def params(self) -> np.ndarray:
        return self._theta

    @params.setter
    def params(self, value):
        value = np.asarray(value, dtype=float)
        if value.shape != self._theta.shape:
            raise ValueError(f"parameter vector must have shape {self._theta.shape}")
        self._theta = value.copy()

    def _forward(self, X):
        X = self._check_dim(X)
        layers = self._layers(self._theta)
        activations = [X]
        pre = None
        a = X
        pres = []
        for idx, (W, b) in enumerate(layers):
            pre = a @ W.T + b
            pres.append(pre)
            if idx < len(layers) - 1:
                a = np.maximum(pre, 0.0)
                activations.append(a)
        z = pres[-1][:, 0]
        if self.output == "softplus":
            y = np.logaddexp(0.0, z)
        else:
            y = z
        return y, z, pres, activations

    def predict(self, X) -> np.ndarray:
        return self._forward(X)[0]

    def grad_dot(self, X, weights) -> np.ndarray:
        y, z, pres, activations = self._forward(X)
        w = np.asarray(weights, dtype=float)
        if self.output == "softplus":
            delta = (w * expit(z))[:, None]
        else:
            delta = w[:, None]
        layers = self._layers(self._theta)
        grads = [None] * len(layers)
        for idx in range(len(layers) - 1, -1, -1):
            W, _ = layers[idx]
            a_prev = activations[idx]
            gW = delta.T @ a_prev
            gb = delta.sum(axis=0)
            grads[idx] = (gW, gb)
            if idx > 0:
                delta = (delta @ W) * (pres[idx - 1] > 0)
        flat = []
        for gW, gb in grads:
            flat.append(gW.reshape(-1))
            flat.append(gb)
        return np.concatenate(flat)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "layer_sizes": self.layer_sizes,
            "output": self.output,
            "seed": self.seed,
            "params": self._theta.tolist(),
        }


def gaussian_basis_linear(centers, bandwidth: float = 1.0, clamp: bool = True) -> GaussianBasisLinear:
    """Ratio model with one zero-initialized weight per center."""
    return GaussianBasisLinear(centers, bandwidth, clamp=clamp)


def mlp(layer_sizes, seed: int = 0, output: str = "softplus") -> MLP:
    return MLP(layer_sizes, seed=seed, output=output)


def model_from_dict(doc: dict) -> RatioModel:
    kind = doc.get("kind")
    if kind == GaussianBasisLinear.kind:
        return GaussianBasisLinear(
            centers=np.asarray(doc["centers"], dtype=float),
            bandwidth=doc["bandwidth"],
            clamp=doc.get("clamp", True),
            weights=np.asarray(doc["params"], dtype=float),
        )
    if kind == MLP.kind:
        return MLP(
            layer_sizes=doc["layer_sizes"],
            seed=doc.get("seed", 0),
            output=doc.get("output", "softplus"),
            params=np.asarray(doc["params"], dtype=float),
        )
    raise DataError(f"unknown model kind {kind!r}")


def save_model(model: RatioModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model.to_dict(), fh, sort_keys=True)
        fh.write("\n")


def load_model(path) -> RatioModel:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read model file {path}: {exc}") from exc
    return model_from_dict(doc)
