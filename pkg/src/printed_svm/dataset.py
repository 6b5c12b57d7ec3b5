"""Tabular dataset ingestion, [0,1] min-max normalization, seeded splits."""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import CsvParseError, ValidationError
from .util import SplitMix64, round_half_up


class Dataset:
    """Feature matrix plus integer class labels.

    `class_count` is carried explicitly so that subsets (e.g. a test split
    that happens to miss a class) keep the parent's label space.
    """

    def __init__(self, features, labels, class_count=None, name=""):
        features = np.asarray(features, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64)
        if features.ndim != 2:
            raise ValidationError("features must be a 2-D matrix")
        if labels.ndim != 1 or labels.shape[0] != features.shape[0]:
            raise ValidationError("labels must be one per sample")
        if features.shape[1] < 1:
            raise ValidationError("need at least one feature")
        if class_count is None:
            class_count = int(labels.max()) + 1 if labels.size else 0
        if class_count < 2:
            raise ValidationError("need at least 2 classes")
        if labels.size and (labels.min() < 0 or labels.max() >= class_count):
            raise ValidationError("labels must lie in [0, class_count)")
        self.features = features
        self.labels = labels
        self.class_count = int(class_count)
        self.name = name

    @property
    def m(self) -> int:
        return self.features.shape[1]

    @property
    def n(self) -> int:
        return self.class_count

    def __len__(self) -> int:
        return self.features.shape[0]

    def subset(self, indices, name=None):
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.class_count,
                       self.name if name is None else name)

    def with_features(self, features, name=None):
        return Dataset(features, self.labels, self.class_count,
                       self.name if name is None else name)


@dataclass
class NormalizationParams:
    """Per-feature (min, max) computed on the training split."""
    mins: np.ndarray
    maxs: np.ndarray

    @property
    def m(self) -> int:
        return self.mins.shape[0]

    def to_json(self):
        return {"mins": self.mins.tolist(), "maxs": self.maxs.tolist()}

    @staticmethod
    def from_json(obj):
        return NormalizationParams(np.asarray(obj["mins"], dtype=np.float64),
                                   np.asarray(obj["maxs"], dtype=np.float64))


@dataclass
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 42

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValidationError("train_fraction must be in (0, 1)")
        if self.seed < 0:
            raise ValidationError("seed must be a non-negative integer")


def _label_sort_key(distinct):
    # Numeric order when every label parses as a number, else lexicographic.
    try:
        return sorted(distinct, key=float)
    except ValueError:
        return sorted(distinct)


def load_csv(path, label_column, header=False, name=None) -> Dataset:
    """Load a comma-separated file; all non-label columns must be numeric.

    Labels are mapped to contiguous 0-based indices in sorted-distinct
    order. Errors name the 1-based line number in the file.
    """
    rows = []
    raw_labels = []
    arity = None
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        for lineno, row in enumerate(reader, start=1):
            if header and lineno == 1:
                continue
            if not row or (len(row) == 1 and row[0].strip() == ""):
                continue  # ignore blank lines
            if arity is None:
                arity = len(row)
                if arity < 2:
                    raise CsvParseError(f"row {lineno}: need at least 2 columns")
                col = label_column if label_column >= 0 else arity + label_column
                if not 0 <= col < arity:
                    raise ValidationError(f"label_column {label_column} out of range for {arity} columns")
            if len(row) != arity:
                raise CsvParseError(f"row {lineno}: expected {arity} columns, got {len(row)}")
            col = label_column if label_column >= 0 else arity + label_column
            feats = []
            for j, cell in enumerate(row):
                if j == col:
                    raw_labels.append(cell.strip())
                    continue
                try:
                    feats.append(float(cell))
                except ValueError:
                    raise CsvParseError(f"row {lineno}: non-numeric cell {cell!r} in column {j}") from None
            rows.append(feats)
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    distinct = _label_sort_key(set(raw_labels))
    if len(distinct) < 2:
        raise ValidationError(f"{path}: fewer than 2 classes")
    index = {lab: i for i, lab in enumerate(distinct)}
    labels = [index[lab] for lab in raw_labels]
    ds_name = name if name is not None else str(path)
    return Dataset(np.array(rows, dtype=np.float64), labels, len(distinct), ds_name)


def fit_normalizer(train: Dataset) -> NormalizationParams:
    if len(train) == 0:
        raise ValidationError("cannot fit normalizer on an empty dataset")
    return NormalizationParams(train.features.min(axis=0), train.features.max(axis=0))


def apply_normalizer(params: NormalizationParams, data: Dataset) -> Dataset:
    """Map each value to (v - min)/(max - min), clamped to [0,1].

    Constant features (max == min) map to 0.
    """
    if params.m != data.m:
        raise ValidationError(f"normalizer has {params.m} features, data has {data.m}")
    span = params.maxs - params.mins
    safe = np.where(span > 0, span, 1.0)
    out = (data.features - params.mins) / safe
    out = np.where(span > 0, out, 0.0)
    np.clip(out, 0.0, 1.0, out=out)
    return data.with_features(out)


def split(data: Dataset, spec: SplitSpec):
    """Deterministic shuffled split; |train| = round(fraction * N) (half up).

    The permutation is drawn from splitmix64 Fisher-Yates, so identical
    (data, seed) gives the identical partition everywhere.
    """
    total = len(data)
    if total < data.n:
        raise ValidationError("dataset smaller than its class count")
    n_train = round_half_up(spec.train_fraction * total)
    n_train = min(max(n_train, 1), total - 1)
    perm = SplitMix64(spec.seed).permutation(total)
    return (data.subset(perm[:n_train]), data.subset(perm[n_train:]))
