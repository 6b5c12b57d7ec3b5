"""Seeded synthetic stand-in datasets shaped like the five UCI tasks.

Gaussian class blobs in [0,1]^m with the same (features, classes, size)
as the real files. Architecture/latency/bit-exactness laws are dataset
independent, so these let the full pipeline and its checks run without
the UCI downloads; accuracy comparisons against published numbers still
require the real data (see README).
"""

import csv

from .dataset import Dataset
from .refdata import DATASET_CLASSES, DATASET_FEATURES, DATASET_SIZES, DATASETS
from .util import SplitMix64, derive_seed

STANDIN_SUFFIX = "_syn"


def make_blobs(name, features, classes, samples, seed, spread=0.09):
    """Balanced Gaussian blobs, clipped to [0,1]; deterministic in seed."""
    rng = SplitMix64(seed)
    centers = []
    for _ in range(classes):
        candidate = None
        for _attempt in range(64):  # keep centers apart; give up gracefully
            candidate = [0.12 + 0.76 * rng.float01() for _ in range(features)]
            if all(sum((a - b) ** 2 for a, b in zip(candidate, other)) > 0.04 * features
                   for other in centers):
                break
        centers.append(candidate)
    feats = []
    labels = []
    for s in range(samples):
        k = s % classes
        row = [min(1.0, max(0.0, centers[k][j] + spread * rng.gauss()))
               for j in range(features)]
        feats.append(row)
        labels.append(k)
    return Dataset(feats, labels, classes, name)


def standin_name(dataset: str) -> str:
    return dataset + STANDIN_SUFFIX


def make_standin(dataset: str, seed=1234, samples=None) -> Dataset:
    """Stand-in with the real task's shape; `samples` can shrink it for
    quick runs."""
    if dataset not in DATASET_CLASSES:
        raise KeyError(f"unknown dataset {dataset!r}; choose from {DATASETS}")
    return make_blobs(standin_name(dataset),
                      DATASET_FEATURES[dataset],
                      DATASET_CLASSES[dataset],
                      samples or DATASET_SIZES[dataset],
                      derive_seed(seed, list(DATASETS).index(dataset)))


def write_csv(data: Dataset, path):
    """Feature columns then the label column, no header."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        for row, label in zip(data.features, data.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])
