"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one `ACCEPTANCE <id> (<title>): PASS/FAIL` line (visible
with `pytest -s`). Laws and ratios run on shape-matched synthetic
stand-ins for the five tasks plus the real UCI files whenever data/ is
populated (scripts/fetch_uci.py); the accuracy-band criterion needs the
real files and reports NOT EVALUATED otherwise.
"""

import itertools
import statistics
from contextlib import contextmanager

import pytest

from conftest import REAL_DATA_DIR, argmax_first, craft_quantized, prepared_standin
from printed_svm import refdata
from printed_svm.circuitgen import (StorageSpec, build_parallel_baseline,
                                    build_sequential, build_storage_netlist,
                                    naive_mux_gate_count)
from printed_svm.dataset import SplitSpec, apply_normalizer, fit_normalizer, load_csv, split
from printed_svm.quantizer import (FixedFormat, QuantPolicy, accumulator_width,
                                   dequantize_value, quantize_model, quantize_value,
                                   raw_inputs, snap_to_input_grid)
from printed_svm.simulator import equivalence_check, measured_latency_cycles, simulate
from printed_svm.trainer import TrainConfig, train_ovr
from printed_svm.util import SplitMix64, ceil_log2, round_half_up
from printed_svm.verilog import emit_hdl, parse_hdl


@contextmanager
def criterion(cid, title):
    try:
        yield
    except pytest.skip.Exception:
        print(f"\nACCEPTANCE {cid} ({title}): NOT EVALUATED (skipped)")
        raise
    except Exception:
        print(f"\nACCEPTANCE {cid} ({title}): FAIL")
        raise
    print(f"\nACCEPTANCE {cid} ({title}): PASS")


SEQ_ROWS = {r.dataset: r for r in refdata.rows_for(refdata.SEQUENTIAL)}


@pytest.fixture(scope="module")
def standin_runs():
    """Full-size stand-in pipelines for all five tasks (netlist included)."""
    runs = {}
    for dataset in refdata.DATASETS:
        stages = prepared_standin(dataset)
        stages["netlist"] = build_sequential(stages["q"])
        runs[dataset] = stages
    return runs


def _real_runs():
    """Same pipeline over any real files present under data/."""
    runs = {}
    for dataset in refdata.DATASETS:
        path = REAL_DATA_DIR / f"{dataset}.csv"
        if not path.exists():
            continue
        data = load_csv(path, label_column=-1, name=dataset)
        train, test = split(data, SplitSpec(0.8, 42))
        norm = fit_normalizer(train)
        fmt = FixedFormat(False, 0, 4)
        train_n = snap_to_input_grid(apply_normalizer(norm, train), fmt)
        test_n = snap_to_input_grid(apply_normalizer(norm, test), fmt)
        model = train_ovr(train_n, TrainConfig())
        q = quantize_model(model, test_n, QuantPolicy())
        runs[dataset] = {"test": test_n, "q": q, "netlist": build_sequential(q)}
    return runs


def test_criterion_1_energy_identity():
    with criterion(1, "energy identity of published sequential rows"):
        for row in SEQ_ROWS.values():
            derived = row.power_mw * row.latency_ms / 1000.0
            assert abs(derived - row.energy_mj) / row.energy_mj <= 0.005, row.dataset


def test_criterion_2_latency_law(standin_runs):
    with criterion(2, "sequential designs finish in exactly n cycles"):
        for dataset, run in standin_runs.items():
            n = refdata.DATASET_CLASSES[dataset]
            assert run["q"].n == n
            x = raw_inputs(run["test"], run["q"].input_format)[0]
            _cls, trace = simulate(run["netlist"], x)
            assert measured_latency_cycles(trace) == n, dataset
        # cross-check n against published latency x frequency products
        for dataset, row in SEQ_ROWS.items():
            product = row.latency_ms / 1000.0 * row.freq_hz
            assert round_half_up(product) == refdata.DATASET_CLASSES[dataset], dataset
        for dataset, run in _real_runs().items():
            x = raw_inputs(run["test"], run["q"].input_format)[0]
            _cls, trace = simulate(run["netlist"], x)
            assert measured_latency_cycles(trace) == refdata.DATASET_CLASSES[dataset]


def test_criterion_3_bit_exact_equivalence(standin_runs):
    with criterion(3, "bit-exact circuit vs integer golden model, all samples"):
        for dataset, run in itertools.chain(standin_runs.items(), _real_runs().items()):
            report = equivalence_check(run["q"], run["netlist"], run["test"])
            assert report.class_mismatches == 0, dataset
            assert report.accumulator_mismatches == 0, dataset
            assert report.accumulator_agreement == 1.0, dataset
            # the emitted-then-reparsed design must agree as well
            reparsed = parse_hdl(emit_hdl(run["netlist"]))
            sample = raw_inputs(run["test"], run["q"].input_format)[0]
            assert simulate(reparsed, sample)[0] == simulate(run["netlist"], sample)[0]


ACCURACY_TARGETS_PCT = {"cardio": 93.4, "dermatology": 98.6, "pendigits": 93.1,
                        "redwine": 64.0, "whitewine": 56.0}
ACCURACY_BAND_PCT = 4.0
ACCURACY_SEEDS = (1, 2, 3, 4, 5)


def _median_quantized_accuracy(path, seeds):
    data = load_csv(path, label_column=-1)
    accs = []
    for seed in seeds:
        train, test = split(data, SplitSpec(0.8, seed))
        norm = fit_normalizer(train)
        fmt = FixedFormat(False, 0, 4)
        train_n = snap_to_input_grid(apply_normalizer(norm, train), fmt)
        test_n = snap_to_input_grid(apply_normalizer(norm, test), fmt)
        model = train_ovr(train_n, TrainConfig(seed=seed))
        q = quantize_model(model, test_n, QuantPolicy())
        accs.append(q.quantized_accuracy * 100.0)
    return statistics.median(accs)


@pytest.mark.realdata
def test_criterion_4_accuracy_bands():
    with criterion(4, "post-quantization accuracy within 4 points of published"):
        missing = [d for d in refdata.DATASETS
                   if not (REAL_DATA_DIR / f"{d}.csv").exists()]
        if missing:
            pytest.skip(
                "accuracy bands need the real UCI files (absent in this "
                f"environment: {missing}); run scripts/fetch_uci.py with network "
                "access and re-run. Laws/identities (criteria 1-3, 5-8) do not "
                "depend on them.")
        for dataset, target in ACCURACY_TARGETS_PCT.items():
            median = _median_quantized_accuracy(REAL_DATA_DIR / f"{dataset}.csv",
                                                ACCURACY_SEEDS)
            print(f"  {dataset}: median {median:.1f}% vs published {target}%")
            assert abs(median - target) <= ACCURACY_BAND_PCT, dataset


def test_criterion_5_architecture_ratios():
    with criterion(5, "engine/storage/baseline resource ratios"):
        rng = SplitMix64(50)

        def model(n, m):
            return craft_quantized(
                [[rng.below(31) - 15 for _ in range(m)] for _ in range(n)],
                [rng.below(201) - 100 for _ in range(n)])

        # m multipliers regardless of n, engine identical across n
        a, b = build_sequential(model(3, 7)), build_sequential(model(10, 7))
        assert a.meta["multiplier_count"] == b.meta["multiplier_count"] == 7
        assert a.census().by_block["engine"] == b.census().by_block["engine"]
        for n in range(3, 11):
            q = model(n, 2)
            seq = build_sequential(q)
            ovo = build_parallel_baseline(q, "ovo_shape")
            par = build_parallel_baseline(q, "ovr")
            assert seq.meta["storage_rows"] == n
            assert ovo.meta["classifier_blocks"] == n * (n - 1) // 2
            ratio = seq.meta["storage_rows"] / ovo.meta["classifier_blocks"]
            assert ratio == pytest.approx(2.0 / (n - 1))
            assert par.meta["multiplier_count"] == n * seq.meta["multiplier_count"]


def test_criterion_6_property_suites():
    with criterion(6, "folding/overflow/tie/round-trip property suites"):
        rng = SplitMix64(60)
        # MUX constant folding: exhaustive select-value equivalence, n<=16, w<=16
        for n, width in ((2, 1), (2, 16), (5, 8), (8, 8), (11, 13), (16, 16)):
            rows = [rng.below(1 << width) for _ in range(n)]
            spec = StorageSpec(rows, width)
            nl = build_storage_netlist(spec)
            from printed_svm.simulator import eval_combinational
            for s in range(n):
                assert eval_combinational(nl, {"sel": s})["row"] == rows[s]
            assert nl.census().total <= naive_mux_gate_count(spec, ceil_log2(n))

        # accumulator overflow-freedom: exhaustive at widths <= 3
        fmts_u = [FixedFormat(False, i, f) for i in range(0, 3) for f in range(0, 4)
                  if 1 <= i + f <= 3]
        fmts_s = [FixedFormat(True, i, f) for i in range(0, 3) for f in range(0, 3)
                  if 1 + i + f <= 3]
        for in_fmt, w_fmt in itertools.product(fmts_u, fmts_s):
            for m in (1, 2, 3):
                b_fmt = FixedFormat(True, w_fmt.integer_bits,
                                    in_fmt.fraction_bits + w_fmt.fraction_bits)
                width = accumulator_width(m, in_fmt, w_fmt, b_fmt)
                for xs in itertools.product(range(in_fmt.raw_max + 1), repeat=m):
                    lo = sum(x * w_fmt.raw_min for x in xs) + b_fmt.raw_min
                    hi = sum(x * w_fmt.raw_max for x in xs) + b_fmt.raw_max
                    assert -(1 << (width - 1)) <= lo and hi < (1 << (width - 1))
        # analytic bound at larger widths
        for in_fmt, w_fmt, m in ((FixedFormat(False, 0, 4), FixedFormat(True, 3, 4), 34),
                                 (FixedFormat(False, 0, 8), FixedFormat(True, 7, 8), 64)):
            b_fmt = FixedFormat(True, w_fmt.integer_bits,
                                in_fmt.fraction_bits + w_fmt.fraction_bits)
            width = accumulator_width(m, in_fmt, w_fmt, b_fmt)
            extreme = m * in_fmt.raw_max * max(abs(w_fmt.raw_min), w_fmt.raw_max) \
                + max(abs(b_fmt.raw_min), b_fmt.raw_max)
            assert extreme < (1 << (width - 1))

        # voter ties: 1000 crafted duplicate-maximum cases -> smallest index
        checked = 0
        while checked < 1000:
            n = 2 + rng.below(7)
            scores = [rng.below(1601) - 800 for _ in range(n)]
            i, j = rng.below(n), rng.below(n)
            scores[i] = scores[j] = max(scores)
            q = craft_quantized([[0]] * n, scores)
            cls, _ = simulate(build_sequential(q), [0])
            assert cls == argmax_first(scores)
            checked += 1

        # quantization round trip: half-ULP bound over 10^4 random values
        fmts = (FixedFormat(False, 0, 4), FixedFormat(True, 2, 2),
                FixedFormat(True, 1, 8), FixedFormat(False, 3, 5))
        for fmt in fmts:
            lo, hi = fmt.raw_min / fmt.scale, fmt.raw_max / fmt.scale
            for _ in range(2500):
                v = lo + (hi - lo) * rng.float01()
                err = abs(dequantize_value(quantize_value(v, fmt), fmt) - v)
                assert err <= 2.0 ** (-fmt.fraction_bits - 1)


def test_criterion_7_battery_feasibility():
    with criterion(7, "printed-battery feasibility at 30 mW"):
        budget = refdata.BATTERY_BUDGET_MW
        for row in refdata.REFERENCE_ROWS:
            feasible = row.power_mw <= budget
            if row.model == refdata.SEQUENTIAL:
                assert feasible, row
        named_infeasible = {57.4, 182.9, 364.4}
        seen = {r.power_mw for r in refdata.REFERENCE_ROWS
                if r.power_mw > budget}
        assert named_infeasible <= seen
        infeasible_baselines = [r for r in refdata.REFERENCE_ROWS
                                if r.model != refdata.SEQUENTIAL and r.power_mw > budget]
        assert len(infeasible_baselines) == 9  # leaves exactly 4 feasible baselines


def test_criterion_8_headline_energy_ratios():
    with criterion(8, "headline energy-improvement ratios from constants"):
        from printed_svm.costmodel import mean_energy_improvement
        ours = refdata.energy_by_dataset(refdata.SEQUENTIAL)
        for family, published in ((refdata.PARALLEL, 10.6),
                                  (refdata.APPROX_SVM, 5.4),
                                  (refdata.APPROX_MLP, 3.46)):
            ratio = mean_energy_improvement(refdata.energy_by_dataset(family), ours)
            assert abs(ratio - published) / published <= 0.03, family
