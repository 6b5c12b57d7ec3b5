"""One-vs-rest linear SVM training (seeded mini-batch Pegasos) and
float-domain prediction/accuracy used as the quantizer's reference."""

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import ValidationError
from .util import splitmix64_block


@dataclass
class TrainConfig:
    lam: float = 1e-3          # L2 regularization strength
    epochs: int = 200
    seed: int = 42
    schedule: str = "pegasos"  # step size 1/(lam * t)
    batch_size: int = 64

    def __post_init__(self):
        if self.lam <= 0:
            raise ValidationError("lam must be positive")
        if self.epochs < 1:
            raise ValidationError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        if self.schedule != "pegasos":
            raise ValidationError(f"unknown schedule {self.schedule!r}")


class SvmModel:
    """n one-vs-rest linear classifiers: weights (n, m) and biases (n,)."""

    strategy = "ovr"

    def __init__(self, weights, biases):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.biases = np.asarray(biases, dtype=np.float64)
        if self.weights.ndim != 2 or self.biases.shape != (self.weights.shape[0],):
            raise ValidationError("weights must be (n, m) with one bias per classifier")
        if self.weights.shape[0] < 2:
            raise ValidationError("need at least 2 classifiers")

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def m(self) -> int:
        return self.weights.shape[1]

    def to_json(self):
        return {
            "m": self.m,
            "n": self.n,
            "strategy": self.strategy,
            "classifiers": [
                {"weights": self.weights[k].tolist(), "bias": float(self.biases[k])}
                for k in range(self.n)
            ],
        }

    @staticmethod
    def from_json(obj):
        cls = obj["classifiers"]
        weights = [c["weights"] for c in cls]
        biases = [c["bias"] for c in cls]
        model = SvmModel(weights, biases)
        if model.m != obj["m"] or model.n != obj["n"]:
            raise ValidationError("model JSON is inconsistent with its declared shape")
        return model


def classifier_count(strategy: str, n: int) -> int:
    """Binary classifiers needed for n classes: OvO n(n-1)/2, OvR n."""
    if n < 2:
        raise ValidationError("need at least 2 classes")
    s = strategy.lower()
    if s == "ovo":
        return n * (n - 1) // 2
    if s == "ovr":
        return n
    raise ValidationError(f"unknown strategy {strategy!r}")


def train_ovr(train: Dataset, cfg: TrainConfig) -> SvmModel:
    """Train one binary hinge classifier per class (class = +1, rest = -1)
    by mini-batch Pegasos with the 1/(lam*t) schedule.

    All n classifiers update in lockstep on the same seeded epoch shuffles
    (one vectorized pass), which is exactly the sequential per-classifier
    result. The bias is an extra always-one feature, so it shares the
    regularizer and the schedule stays stable. Deterministic in (data, cfg).
    """
    present = np.unique(train.labels)
    if present.size < 2:
        raise ValidationError("training data contains a single class")
    total, m = train.features.shape
    n = train.n
    aug = np.concatenate([train.features, np.ones((total, 1))], axis=1)
    targets = np.full((total, n), -1.0)
    targets[np.arange(total), train.labels] = 1.0
    w = np.zeros((n, m + 1))
    t = 0
    for epoch in range(cfg.epochs):
        keys = splitmix64_block(cfg.seed, epoch * total, total)
        order = np.argsort(keys, kind="stable")
        for lo in range(0, total, cfg.batch_size):
            batch = order[lo:lo + cfg.batch_size]
            t += 1
            eta = 1.0 / (cfg.lam * t)
            xb = aug[batch]
            yb = targets[batch]
            viol = (yb * (xb @ w.T)) < 1.0          # hinge margin violations
            grad = (yb * viol).T @ xb / len(batch)  # (n, m+1)
            w = (1.0 - eta * cfg.lam) * w + eta * grad
    return SvmModel(w[:, :m], w[:, m])


def decision_values(model: SvmModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.m,):
        raise ValidationError(f"expected {model.m} features, got {x.shape}")
    return model.weights @ x + model.biases


def predict(model: SvmModel, x) -> int:
    """Argmax class; ties go to the smallest index (the hardware voter rule)."""
    return int(np.argmax(decision_values(model, x)))


def accuracy(model: SvmModel, data: Dataset) -> float:
    if len(data) == 0:
        raise ValidationError("cannot score an empty dataset")
    if data.m != model.m:
        raise ValidationError("feature count mismatch")
    scores = data.features @ model.weights.T + model.biases
    pred = np.argmax(scores, axis=1)  # np.argmax takes the first maximum
    return float(np.mean(pred == data.labels))
