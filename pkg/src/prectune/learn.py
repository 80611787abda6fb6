"""Learned error models: a small MLP regressing the log error of usable
configs, and a decision tree flagging configs with no usable digits.

Both models are written out longhand on purpose.  The solver needs exact
knowledge of the inference path (layer shapes, activation choice, split
predicate, tie-breaking) to bound model output over boxes of configs, and
byte-identical retraining given identical data and seeds.

Regressor: layers [n, 2n, 2n, n, 1], ReLU between, linear output, trained
with Adam on mean squared error over the class-0 subset only.  Inputs are
scaled to [0, 1] from the dataset width box.  Targets are standardized for
training and the affine correction is folded back into the output layer,
so the stored model predicts log error directly.

Classifier: CART over integer widths, Gini impurity, splits of the form
x[f] <= t with t an attained value below the feature max.  Ties prefer the
lowest feature then the lowest threshold; zero-gain splits are taken when
nothing better exists (both sides stay nonempty, so growth terminates).
Leaves predict the majority label, ties resolving to 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, Sample


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    epochs: int = 100
    batch_size: int = 32
    max_depth: int = 20
    seed: int = 0


# --- regressor ---------------------------------------------------------------


@dataclass
class MLPModel:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    input_lo: float
    input_hi: float

    @property
    def n_inputs(self) -> int:
        return self.weights[0].shape[0]

    def normalize(self, x: np.ndarray) -> np.ndarray:
        width = max(self.input_hi - self.input_lo, 1.0)
        return (np.asarray(x, dtype=np.float64) - self.input_lo) / width

    def forward(self, x: np.ndarray) -> np.ndarray:
        a = self.normalize(np.atleast_2d(x))
        last = len(self.weights) - 1
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w + b
            a = z if l == last else np.maximum(z, 0.0)
        return a[:, 0]


def layer_sizes(n_inputs: int) -> list[int]:
    return [n_inputs, 2 * n_inputs, 2 * n_inputs, n_inputs, 1]


def init_mlp(n_inputs: int, lo: float, hi: float, seed: int) -> MLPModel:
    rng = np.random.default_rng(seed)
    sizes = layer_sizes(n_inputs)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        limit = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, (fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MLPModel(weights, biases, float(lo), float(hi))


def _forward_cache(weights, biases, x):
    acts = [x]
    pre = []
    last = len(weights) - 1
    a = x
    for l, (w, b) in enumerate(zip(weights, biases)):
        z = a @ w + b
        pre.append(z)
        a = z if l == last else np.maximum(z, 0.0)
        acts.append(a)
    return acts, pre


def _loss_and_grads(weights, biases, x, y):
    """Mean squared error and its gradients for one batch.

    x: (B, n) normalized inputs, y: (B,) targets.
    """
    acts, pre = _forward_cache(weights, biases, x)
    out = acts[-1][:, 0]
    diff = out - y
    n = x.shape[0]
    loss = float(np.mean(diff**2))
    delta = (2.0 * diff / n)[:, None]
    g_w = [None] * len(weights)
    g_b = [None] * len(weights)
    for l in reversed(range(len(weights))):
        g_w[l] = acts[l].T @ delta
        g_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ weights[l].T) * (pre[l - 1] > 0.0)
    return loss, g_w, g_b


class _Adam:
    def __init__(self, shapes, cfg: TrainConfig):
        self.cfg = cfg
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def step(self, params, grads):
        c = self.cfg
        self.t += 1
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= c.beta1
            m += (1.0 - c.beta1) * g
            v *= c.beta2
            v += (1.0 - c.beta2) * g * g
            m_hat = m / (1.0 - c.beta1**self.t)
            v_hat = v / (1.0 - c.beta2**self.t)
            p -= c.learning_rate * m_hat / (np.sqrt(v_hat) + c.adam_eps)


def train_regressor(ds: Dataset, cfg: TrainConfig = TrainConfig()) -> MLPModel:
    """Fit the log-error regressor on the usable (class-0) samples."""
    keep = [s for s in ds.samples if s.class_label == 0]
    if not keep:
        raise InsufficientDataError(f"{ds.benchmark}: no class-0 samples to regress on")
    model = init_mlp(ds.n_var, ds.nbit_lo, ds.nbit_hi, cfg.seed)
    x = model.normalize(np.array([s.config for s in keep], dtype=np.float64))
    y_raw = np.array([s.log_err for s in keep])
    mu = float(np.mean(y_raw))
    sigma = max(float(np.std(y_raw)), 1e-12)
    y = (y_raw - mu) / sigma

    rng = np.random.default_rng(cfg.seed + 1)
    shapes = [w.shape for w in model.weights] + [b.shape for b in model.biases]
    opt = _Adam(shapes, cfg)
    n = x.shape[0]
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            _, g_w, g_b = _loss_and_grads(model.weights, model.biases, x[idx], y[idx])
            opt.step(model.weights + model.biases, g_w + g_b)

    # fold the target standardization into the linear output layer
    model.weights[-1] *= sigma
    model.biases[-1] = model.biases[-1] * sigma + mu
    return model


def predict_logerr(model: MLPModel, config) -> float:
    cfg = np.asarray(config, dtype=np.float64)
    if cfg.ndim == 1:
        return float(model.forward(cfg)[0])
    return model.forward(cfg)


# --- classifier ---------------------------------------------------------------


@dataclass
class DTModel:
    root: dict
    n_inputs: int
    max_depth: int


def _gini(labels: np.ndarray) -> float:
    if labels.size == 0:
        return 0.0
    p = float(np.mean(labels))
    return 2.0 * p * (1.0 - p)


def _majority(labels: np.ndarray) -> int:
    ones = int(labels.sum())
    zeros = labels.size - ones
    return 1 if ones >= zeros else 0


def _grow(x: np.ndarray, labels: np.ndarray, depth: int, max_depth: int) -> dict:
    if depth >= max_depth or labels.size < 2 or np.all(labels == labels[0]):
        return {"leaf": _majority(labels)}
    parent = _gini(labels)
    n = labels.size
    best = None  # (gain, feature, threshold) under strict-improvement order
    for f in range(x.shape[1]):
        values = np.unique(x[:, f])
        for t in values[:-1]:
            mask = x[:, f] <= t
            nl = int(mask.sum())
            gain = parent - (nl * _gini(labels[mask]) + (n - nl) * _gini(labels[~mask])) / n
            if best is None or gain > best[0]:
                best = (gain, f, int(t))
    if best is None:
        return {"leaf": _majority(labels)}
    _, f, t = best
    mask = x[:, f] <= t
    return {
        "feature": f,
        "threshold": t,
        "left": _grow(x[mask], labels[mask], depth + 1, max_depth),
        "right": _grow(x[~mask], labels[~mask], depth + 1, max_depth),
    }


def train_classifier(ds: Dataset, cfg: TrainConfig = TrainConfig()) -> DTModel:
    if not ds.samples:
        raise InsufficientDataError(f"{ds.benchmark}: empty dataset")
    x = ds.configs()
    labels = ds.class_labels()
    root = _grow(x, labels, 0, cfg.max_depth)
    return DTModel(root=root, n_inputs=ds.n_var, max_depth=cfg.max_depth)


def classify(model: DTModel, config) -> int:
    cfg = np.asarray(config)
    node = model.root
    while "leaf" not in node:
        node = node["left"] if cfg[node["feature"]] <= node["threshold"] else node["right"]
    return int(node["leaf"])


# --- evaluation ---------------------------------------------------------------


def split_dataset(ds: Dataset, holdout_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    if not 0.0 < holdout_fraction < 1.0:
        raise ValueError(f"holdout fraction {holdout_fraction} outside (0, 1)")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(ds.samples))
    n_hold = max(1, int(round(holdout_fraction * len(ds.samples))))
    hold_idx = set(order[:n_hold].tolist())
    train = [s for i, s in enumerate(ds.samples) if i not in hold_idx]
    hold = [s for i, s in enumerate(ds.samples) if i in hold_idx]

    def mk(samples: list[Sample]) -> Dataset:
        return Dataset(
            benchmark=ds.benchmark,
            nbit_lo=ds.nbit_lo,
            nbit_hi=ds.nbit_hi,
            seed_input=ds.seed_input,
            seed_sample=ds.seed_sample,
            shape=dict(ds.shape),
            samples=samples,
        )

    return mk(train), mk(hold)


def eval_models(reg: MLPModel | None, clf: DTModel, ds: Dataset) -> dict:
    """Holdout metrics: regression error on the class-0 subset, label
    accuracy and confusion counts on everything."""
    labels = ds.class_labels()
    preds = np.array([classify(clf, s.config) for s in ds.samples], dtype=np.int64)
    confusion = {
        "tn": int(np.sum((labels == 0) & (preds == 0))),
        "fp": int(np.sum((labels == 0) & (preds == 1))),
        "fn": int(np.sum((labels == 1) & (preds == 0))),
        "tp": int(np.sum((labels == 1) & (preds == 1))),
    }
    accuracy = float(np.mean(preds == labels)) if labels.size else 0.0

    rmse = None
    nrmse = None
    if reg is not None:
        keep = [s for s in ds.samples if s.class_label == 0]
        if keep:
            x = np.array([s.config for s in keep], dtype=np.float64)
            y = np.array([s.log_err for s in keep])
            yhat = reg.forward(x)
            rmse = float(np.sqrt(np.mean((yhat - y) ** 2)))
            spread = float(y.max() - y.min())
            nrmse = rmse / spread if spread > 0 else (0.0 if rmse == 0.0 else float("inf"))
    return {"rmse": rmse, "nrmse": nrmse, "accuracy": accuracy, "confusion": confusion}


# --- serialization -------------------------------------------------------------


def save_regressor(model: MLPModel, path) -> None:
    doc = {
        "kind": "mlp_logerr_regressor",
        "input_lo": model.input_lo,
        "input_hi": model.input_hi,
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_regressor(path) -> MLPModel:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("kind") != "mlp_logerr_regressor":
        raise ValueError(f"{path}: not a regressor file")
    return MLPModel(
        weights=[np.array(w) for w in doc["weights"]],
        biases=[np.array(b) for b in doc["biases"]],
        input_lo=doc["input_lo"],
        input_hi=doc["input_hi"],
    )


def save_classifier(model: DTModel, path) -> None:
    doc = {
        "kind": "dt_blowup_classifier",
        "n_inputs": model.n_inputs,
        "max_depth": model.max_depth,
        "root": model.root,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_classifier(path) -> DTModel:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("kind") != "dt_blowup_classifier":
        raise ValueError(f"{path}: not a classifier file")
    return DTModel(root=doc["root"], n_inputs=doc["n_inputs"], max_depth=doc["max_depth"])
