from pathlib import Path

import numpy as np
import pytest

from printed_svm.dataset import SplitSpec, apply_normalizer, fit_normalizer, split
from printed_svm.quantizer import FixedFormat, QuantPolicy, QuantizedSvm, quantize_model, snap_to_input_grid
from printed_svm.synthetic import make_standin
from printed_svm.trainer import TrainConfig, train_ovr


def pyint_scores(q, x_raw):
    """Arbitrary-precision integer oracle for the quantized decision values."""
    return [sum(int(q.weights[k, i]) * int(x_raw[i]) for i in range(q.m))
            + int(q.biases[k]) for k in range(q.n)]


def argmax_first(values):
    """Reference argmax with the smallest-index tie rule."""
    best, best_i = values[0], 0
    for i, v in enumerate(values):
        if v > best:
            best, best_i = v, i
    return best_i


def craft_quantized(weights_raw, biases_raw, input_fmt=None, weight_fmt=None,
                    name="crafted"):
    """QuantizedSvm straight from raw integer tables (bias at product scale)."""
    weights_raw = np.asarray(weights_raw, dtype=np.int64)
    biases_raw = np.asarray(biases_raw, dtype=np.int64)
    input_fmt = input_fmt or FixedFormat(False, 0, 4)
    weight_fmt = weight_fmt or FixedFormat(True, 2, 4)
    bias_fraction = input_fmt.fraction_bits + weight_fmt.fraction_bits
    need = int(max(1, np.abs(biases_raw).max()))
    int_bits = 0
    while (1 << (int_bits + bias_fraction)) < need + 1:
        int_bits += 1
    bias_fmt = FixedFormat(True, int_bits, bias_fraction)
    return QuantizedSvm(input_fmt, weight_fmt, bias_fmt, weights_raw, biases_raw,
                        name=name)


def prepared_standin(key, samples=None, seed=42, epochs=200):
    """Full in-memory pipeline on a stand-in; returns a dict of stages."""
    data = make_standin(key, samples=samples)
    train, test = split(data, SplitSpec(0.8, seed))
    norm = fit_normalizer(train)
    in_fmt = FixedFormat(False, 0, 4)
    train_n = snap_to_input_grid(apply_normalizer(norm, train), in_fmt)
    test_n = snap_to_input_grid(apply_normalizer(norm, test), in_fmt)
    model = train_ovr(train_n, TrainConfig(epochs=epochs, seed=seed))
    q = quantize_model(model, test_n, QuantPolicy())
    return {"data": data, "train": train_n, "test": test_n, "norm": norm,
            "model": model, "q": q}


@pytest.fixture(scope="session")
def cardio_small():
    """Shared small cardio-shaped pipeline (fast; reused across modules)."""
    return prepared_standin("cardio", samples=600)


@pytest.fixture(scope="session")
def cardio_netlist(cardio_small):
    from printed_svm.circuitgen import build_sequential
    return build_sequential(cardio_small["q"])


REAL_DATA_DIR = Path(__file__).resolve().parent.parent / "data"
REAL_FILES = ("cardio.csv", "dermatology.csv", "pendigits.csv",
              "redwine.csv", "whitewine.csv")
_SKIP_REAL = ("real UCI files not present under data/; "
              "run scripts/fetch_uci.py on a machine with network access")


def require_real(name):
    path = REAL_DATA_DIR / f"{name}.csv"
    if not path.exists():
        pytest.skip(f"{_SKIP_REAL} (missing {path.name})")
    return path


@pytest.fixture
def real_data_dir():
    missing = [f for f in REAL_FILES if not (REAL_DATA_DIR / f).exists()]
    if missing:
        pytest.skip(f"{_SKIP_REAL} (missing {missing})")
    return REAL_DATA_DIR
