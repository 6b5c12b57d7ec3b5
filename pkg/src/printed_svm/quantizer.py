"""Fixed-point conversion of trained SVMs: format search under an accuracy
gate, overflow-free accumulator sizing, and the integer golden model."""

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import ValidationError
from .trainer import SvmModel, accuracy
from .util import ceil_log2, round_half_away


@dataclass(frozen=True)
class FixedFormat:
    """value = raw / 2^fraction_bits; raw is two's complement when signed."""
    signed: bool
    integer_bits: int
    fraction_bits: int

    def __post_init__(self):
        if self.integer_bits < 0 or self.fraction_bits < 0:
            raise ValidationError("bit counts must be non-negative")
        if self.total_bits < 1:
            raise ValidationError("format must be at least 1 bit wide")

    @property
    def total_bits(self) -> int:
        return (1 if self.signed else 0) + self.integer_bits + self.fraction_bits

    @property
    def scale(self) -> int:
        return 1 << self.fraction_bits

    @property
    def raw_min(self) -> int:
        return -(1 << (self.integer_bits + self.fraction_bits)) if self.signed else 0

    @property
    def raw_max(self) -> int:
        return (1 << (self.integer_bits + self.fraction_bits)) - 1

    def __str__(self):
        return f"{'s' if self.signed else 'u'}{self.integer_bits}.{self.fraction_bits}"

    def to_json(self):
        return {"signed": self.signed, "integer_bits": self.integer_bits,
                "fraction_bits": self.fraction_bits}

    @staticmethod
    def from_json(obj):
        return FixedFormat(bool(obj["signed"]), int(obj["integer_bits"]),
                           int(obj["fraction_bits"]))


@dataclass
class QuantPolicy:
    max_accuracy_drop: float = 0.01      # absolute, vs float accuracy
    weight_fraction_min: int = 2
    weight_fraction_max: int = 12
    input_fraction_bits: int = 4

    def __post_init__(self):
        if self.max_accuracy_drop < 0:
            raise ValidationError("max_accuracy_drop must be >= 0")
        if not 0 <= self.weight_fraction_min <= self.weight_fraction_max:
            raise ValidationError("bad weight fraction_bits range")
        if self.input_fraction_bits < 1:
            raise ValidationError("input_fraction_bits must be >= 1")


def quantize_value(v: float, fmt: FixedFormat) -> int:
    """Round half away from zero to the raw grid, then saturate."""
    raw = round_half_away(v * fmt.scale)
    return min(max(raw, fmt.raw_min), fmt.raw_max)


def dequantize_value(raw: int, fmt: FixedFormat) -> float:
    if not fmt.raw_min <= raw <= fmt.raw_max:
        raise ValidationError(f"raw {raw} out of range for {fmt}")
    return raw / fmt.scale


def _quantize_table(values, fmt: FixedFormat):
    """Vectorized quantize; returns (raw int64 array, saturation count)."""
    v = np.asarray(values, dtype=np.float64) * fmt.scale
    raw = np.floor(np.abs(v) + 0.5) * np.sign(v)
    sat = int(np.count_nonzero((raw < fmt.raw_min) | (raw > fmt.raw_max)))
    return np.clip(raw, fmt.raw_min, fmt.raw_max).astype(np.int64), sat


def accumulator_width(m: int, input_fmt: FixedFormat, weight_fmt: FixedFormat,
                      bias_fmt: FixedFormat) -> int:
    """Signed width that provably holds sum of m products plus the bias.

    Each product fits in (input bits + weight bits); summing m products and
    one bias operand adds ceil(log2(m+1)) bits. The bias term is assumed
    pre-aligned to the product fraction scale; if its stored width exceeds
    the product width, the wider operand sets the base.
    """
    if m < 1:
        raise ValidationError("m must be >= 1")
    product_bits = input_fmt.total_bits + weight_fmt.total_bits
    base = max(product_bits, bias_fmt.total_bits)
    return base + ceil_log2(m + 1)


class QuantizedSvm:
    """Fixed-point OvR SVM: raw integer weight/bias tables plus formats.

    Biases are stored pre-aligned to the product fraction scale
    (input.f + weight.f) so the hardware adder needs no shifter.
    """

    def __init__(self, input_format, weight_format, bias_format, weights, biases,
                 quantized_accuracy=None, float_accuracy=None, gate_met=True,
                 saturation_count=0, name=""):
        self.input_format = input_format
        self.weight_format = weight_format
        self.bias_format = bias_format
        self.weights = np.asarray(weights, dtype=np.int64)
        self.biases = np.asarray(biases, dtype=np.int64)
        if self.weights.ndim != 2 or self.biases.shape != (self.weights.shape[0],):
            raise ValidationError("weights must be (n, m) with one bias per row")
        if input_format.signed or not (weight_format.signed and bias_format.signed):
            raise ValidationError("inputs are unsigned; weights and biases signed")
        if bias_format.fraction_bits != input_format.fraction_bits + weight_format.fraction_bits:
            raise ValidationError("bias must be pre-aligned to the product scale")
        for table, fmt in ((self.weights, weight_format), (self.biases, bias_format)):
            if table.size and (table.min() < fmt.raw_min or table.max() > fmt.raw_max):
                raise ValidationError(f"raw table exceeds {fmt} range")
        self.quantized_accuracy = quantized_accuracy
        self.float_accuracy = float_accuracy
        self.gate_met = gate_met
        self.saturation_count = saturation_count
        self.name = name

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def m(self) -> int:
        return self.weights.shape[1]

    @property
    def accumulator_width(self) -> int:
        return accumulator_width(self.m, self.input_format, self.weight_format,
                                 self.bias_format)

    def to_json(self):
        return {
            "name": self.name,
            "m": self.m,
            "n": self.n,
            "input_format": self.input_format.to_json(),
            "weight_format": self.weight_format.to_json(),
            "bias_format": self.bias_format.to_json(),
            "accumulator_width": self.accumulator_width,
            "weights": self.weights.tolist(),
            "biases": self.biases.tolist(),
            "quantized_accuracy": self.quantized_accuracy,
            "float_accuracy": self.float_accuracy,
            "gate_met": self.gate_met,
            "saturation_count": self.saturation_count,
        }

    @staticmethod
    def from_json(obj):
        q = QuantizedSvm(
            FixedFormat.from_json(obj["input_format"]),
            FixedFormat.from_json(obj["weight_format"]),
            FixedFormat.from_json(obj["bias_format"]),
            obj["weights"], obj["biases"],
            obj.get("quantized_accuracy"), obj.get("float_accuracy"),
            obj.get("gate_met", True), obj.get("saturation_count", 0),
            obj.get("name", ""),
        )
        if q.accumulator_width != obj["accumulator_width"]:
            raise ValidationError("accumulator_width inconsistent with formats")
        return q


def snap_to_input_grid(data: Dataset, fmt: FixedFormat) -> Dataset:
    """Pre-round features to the input fixed-point grid (low-precision inputs
    are used both for training and at the circuit boundary)."""
    raw = raw_inputs(data, fmt)
    return data.with_features(raw.astype(np.float64) / fmt.scale)


def raw_inputs(data: Dataset, fmt: FixedFormat) -> np.ndarray:
    """Feature matrix as raw input-format integers (saturating)."""
    v = data.features * fmt.scale
    raw = np.floor(np.abs(v) + 0.5) * np.sign(v)
    return np.clip(raw, fmt.raw_min, fmt.raw_max).astype(np.int64)


def quantized_scores(q: QuantizedSvm, x_raw) -> np.ndarray:
    """Exact integer decision values at scale 2^(input.f + weight.f).

    This is the golden reference the simulator is checked against.
    """
    x = np.asarray(x_raw, dtype=np.int64)
    if x.shape != (q.m,):
        raise ValidationError(f"expected {q.m} raw inputs, got {x.shape}")
    if x.size and (x.min() < q.input_format.raw_min or x.max() > q.input_format.raw_max):
        raise ValidationError("raw input out of input-format range")
    return q.weights @ x + q.biases


def _score_matrix(q_weights, q_biases, x_raw_matrix):
    return x_raw_matrix @ q_weights.T + q_biases


def _quantized_accuracy(q_weights, q_biases, x_raw_matrix, labels) -> float:
    scores = _score_matrix(q_weights, q_biases, x_raw_matrix)
    return float(np.mean(np.argmax(scores, axis=1) == labels))


def _covering_integer_bits(lo: float, hi: float, fraction_bits: int) -> int:
    """Smallest i >= 0 with [-2^i, 2^i - 2^-f] covering [lo, hi]."""
    i = 0
    while -(1 << i) > lo or hi > (1 << i) - 2.0 ** (-fraction_bits):
        i += 1
    return i


def quantize_model(model: SvmModel, val: Dataset, policy: QuantPolicy) -> QuantizedSvm:
    """Search the lowest weight/bias precision whose accuracy stays within
    policy.max_accuracy_drop of the float model on `val`.

    Weight integer bits are fixed first (smallest covering max |w| at the
    narrowest candidate fraction). fraction_bits candidates are evaluated
    exhaustively from max down to min on the same split; the accepted f is
    the minimum meeting the gate. If none meets it, the best candidate is
    returned flagged gate_met=False.
    """
    if val.m != model.m:
        raise ValidationError("validation data does not match model features")
    in_fmt = FixedFormat(False, 0, policy.input_fraction_bits)
    val_snapped = snap_to_input_grid(val, in_fmt)
    float_acc = accuracy(model, val_snapped)
    x_raw = raw_inputs(val, in_fmt)

    w_int = _covering_integer_bits(float(model.weights.min(initial=0.0)),
                                   float(model.weights.max(initial=0.0)),
                                   policy.weight_fraction_min)
    candidates = []
    for f in range(policy.weight_fraction_max, policy.weight_fraction_min - 1, -1):
        w_fmt = FixedFormat(True, w_int, f)
        bias_fraction = in_fmt.fraction_bits + f
        b_int = max(w_int, _covering_integer_bits(float(model.biases.min(initial=0.0)),
                                                  float(model.biases.max(initial=0.0)),
                                                  bias_fraction))
        b_fmt = FixedFormat(True, b_int, bias_fraction)
        qw, sat_w = _quantize_table(model.weights, w_fmt)
        qb, sat_b = _quantize_table(model.biases, b_fmt)
        acc = _quantized_accuracy(qw, qb, x_raw, val.labels)
        candidates.append({
            "f": f, "w_fmt": w_fmt, "b_fmt": b_fmt, "qw": qw, "qb": qb,
            "acc": acc, "sat": sat_w + sat_b,
        })

    gate = float_acc - policy.max_accuracy_drop
    passing = [c for c in candidates if c["acc"] >= gate]
    if passing:
        chosen = min(passing, key=lambda c: c["f"])
        gate_met = True
    else:
        chosen = max(candidates, key=lambda c: (c["acc"], -c["f"]))
        gate_met = False
    return QuantizedSvm(in_fmt, chosen["w_fmt"], chosen["b_fmt"], chosen["qw"],
                        chosen["qb"], chosen["acc"], float_acc, gate_met,
                        chosen["sat"], name=val.name)
