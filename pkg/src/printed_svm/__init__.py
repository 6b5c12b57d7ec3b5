"""Sequential bespoke SVM circuits for printed electronics.

Pipeline: load/normalize/split tabular data -> train one-vs-rest linear
SVMs -> quantize to fixed point with a bitwidth search -> lower to a
gate-level netlist (sequential architecture or parallel baseline) ->
verify bit-exactly by cycle-accurate simulation -> estimate area, power,
frequency, latency, and energy under a parametric printed-technology
cost model.
"""

__version__ = "0.1.0"

from .dataset import Dataset, NormalizationParams, SplitSpec, load_csv, fit_normalizer, apply_normalizer, split
from .trainer import SvmModel, TrainConfig, classifier_count, train_ovr, decision_values, predict, accuracy
from .quantizer import (
    FixedFormat,
    QuantPolicy,
    QuantizedSvm,
    quantize_value,
    dequantize_value,
    accumulator_width,
    quantize_model,
    quantized_scores,
)
from .circuitgen import build_sequential, build_parallel_baseline, gate_census
from .verilog import emit_hdl, parse_hdl
from .simulator import simulate, equivalence_check, measured_latency_cycles
from .costmodel import TechFile, CostReport, estimate, battery_check, compare_designs
