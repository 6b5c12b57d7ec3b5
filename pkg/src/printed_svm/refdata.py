"""Bundled literature-reported hardware measurements for printed classifiers.

Reference rows from published EGFET-flow evaluations on five UCI tasks:
one fully parallel bespoke SVM family, an approximate parallel SVM family,
an approximate MLP family, and the sequential bespoke SVM these tools
generate. Used for comparison tables and for ratio/identity checks; the
default cost model is uncalibrated, so these absolute values are reference
constants, not regeneration targets.
"""

from dataclasses import dataclass

from .errors import ValidationError

SEQUENTIAL = "sequential-svm"
PARALLEL = "parallel-svm"
APPROX_SVM = "approx-svm"
APPROX_MLP = "approx-mlp"


@dataclass(frozen=True)
class ReferenceRow:
    dataset: str
    model: str
    accuracy_pct: float
    area_cm2: float
    power_mw: float
    freq_hz: float
    latency_ms: float
    energy_mj: float


REFERENCE_ROWS = (
    ReferenceRow("cardio", PARALLEL, 90.0, 15.1, 57.4, 13, 75, 4.31),
    ReferenceRow("cardio", APPROX_SVM, 89.0, 17.0, 48.9, 13, 75, 3.67),
    ReferenceRow("cardio", APPROX_MLP, 87.0, 6.1, 20.8, 5, 200, 4.16),
    ReferenceRow("cardio", SEQUENTIAL, 93.4, 17.1, 17.6, 38, 78, 1.373),
    ReferenceRow("dermatology", PARALLEL, 97.2, 60.4, 182.9, 8, 120, 21.95),
    ReferenceRow("dermatology", SEQUENTIAL, 98.6, 13.9, 14.3, 38, 156, 2.231),
    ReferenceRow("pendigits", PARALLEL, 97.8, 123.8, 364.4, 4, 250, 91.1),
    ReferenceRow("pendigits", APPROX_SVM, 97.0, 97.0, 183.7, 4, 250, 45.92),
    ReferenceRow("pendigits", APPROX_MLP, 93.0, 32.7, 99.2, 4, 250, 24.8),
    ReferenceRow("pendigits", SEQUENTIAL, 93.1, 22.9, 22.9, 35, 280, 6.41),
    ReferenceRow("redwine", PARALLEL, 57.0, 23.5, 92.8, 15, 66, 6.12),
    ReferenceRow("redwine", APPROX_SVM, 56.0, 11.7, 21.3, 15, 66, 1.41),
    ReferenceRow("redwine", APPROX_MLP, 56.0, 1.1, 3.9, 5, 200, 0.79),
    ReferenceRow("redwine", SEQUENTIAL, 64.0, 6.2, 6.7, 42, 144, 0.965),
    ReferenceRow("whitewine", PARALLEL, 53.0, 28.3, 112.4, 17, 60, 6.74),
    ReferenceRow("whitewine", APPROX_SVM, 52.0, 11.0, 34.7, 17, 60, 2.08),
    ReferenceRow("whitewine", APPROX_MLP, 53.0, 6.5, 21.3, 5, 200, 4.26),
    ReferenceRow("whitewine", SEQUENTIAL, 56.0, 6.0, 6.4, 34, 203, 1.299),
)

DATASETS = ("cardio", "dermatology", "pendigits", "redwine", "whitewine")

# class and feature counts of the five UCI tasks (label column excluded)
DATASET_CLASSES = {"cardio": 3, "dermatology": 6, "pendigits": 10,
                   "redwine": 6, "whitewine": 7}
DATASET_FEATURES = {"cardio": 21, "dermatology": 34, "pendigits": 16,
                    "redwine": 11, "whitewine": 11}
DATASET_SIZES = {"cardio": 2126, "dermatology": 366, "pendigits": 10992,
                 "redwine": 1599, "whitewine": 4898}

BATTERY_BUDGET_MW = 30.0  # commercially available printed battery envelope


def rows_for(model=None, dataset=None):
    out = [r for r in REFERENCE_ROWS
           if (model is None or r.model == model)
           and (dataset is None or r.dataset == dataset)]
    if not out:
        raise ValidationError(f"no reference rows for model={model} dataset={dataset}")
    return out


def energy_by_dataset(model: str) -> dict:
    return {r.dataset: r.energy_mj for r in rows_for(model=model)}
