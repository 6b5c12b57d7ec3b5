import pytest

from conftest import craft_quantized
from printed_svm import refdata
from printed_svm.circuitgen import build_parallel_baseline, build_sequential
from printed_svm.costmodel import (DEFAULT_TECH, CostReport, GateCost, TechFile,
                                   battery_check, calibrate_tech, compare_designs,
                                   critical_path_ms, estimate, geomean_ratios,
                                   mean_energy_improvement)
from printed_svm.errors import ValidationError
from printed_svm.netlist import Netlist
from printed_svm.util import SplitMix64


def _model(n, m=2, seed=0):
    rng = SplitMix64(seed)
    return craft_quantized([[rng.below(31) - 15 for _ in range(m)] for _ in range(n)],
                           [rng.below(201) - 100 for _ in range(n)])


def _chain(length):
    nl = Netlist(f"chain{length}")
    a = nl.add_input_bus("a", 1)
    net = a[0]
    for _ in range(length):
        net = nl.gate("NOT", (net,), "core")
    nl.set_output_bus("y", [net])
    return nl


class TestEstimate:
    def test_single_gate_unit_case(self):
        nl = _chain(1)
        g = DEFAULT_TECH.gates["NOT"]
        report = estimate(nl, 1, DEFAULT_TECH, target_f_hz=1.0)
        assert report.area_cm2 == g.area_cm2
        assert report.power_mw == g.power_mw
        assert report.latency_ms == 1000.0
        assert report.energy_mj == g.power_mw * 1000.0 / 1000.0

    def test_energy_identity_exact(self, cardio_netlist):
        report = estimate(cardio_netlist, cardio_netlist.meta["n"])
        assert report.energy_mj == report.power_mw * report.latency_ms / 1000.0
        assert report.latency_ms == report.cycles / report.f_hz * 1000.0

    def test_monotone_in_gates(self):
        small = estimate(_chain(3), 1)
        big = estimate(_chain(9), 1)
        assert big.area_cm2 > small.area_cm2
        assert big.power_mw > small.power_mw
        assert big.f_max_hz < small.f_max_hz

    def test_area_scales_linearly(self, cardio_netlist):
        base = estimate(cardio_netlist, 3)
        scaled = estimate(cardio_netlist, 3, DEFAULT_TECH.scaled(area_scale=2.5))
        assert scaled.area_cm2 == pytest.approx(2.5 * base.area_cm2, rel=1e-12)
        assert scaled.power_mw == base.power_mw

    def test_target_above_fmax_clamped_with_warning(self):
        nl = _chain(4)
        with pytest.warns(UserWarning, match="clamped"):
            report = estimate(nl, 1, DEFAULT_TECH, target_f_hz=1e9)
        assert report.f_hz == report.f_max_hz

    def test_target_below_fmax_used(self, cardio_netlist):
        report = estimate(cardio_netlist, 3, DEFAULT_TECH, target_f_hz=5.0)
        assert report.f_hz == 5.0
        assert report.latency_ms == pytest.approx(3 / 5.0 * 1000.0)

    def test_cycles_validated(self, cardio_netlist):
        with pytest.raises(ValidationError):
            estimate(cardio_netlist, 0)


class TestCriticalPath:
    def test_chain_delay_adds_up(self):
        nl = _chain(5)
        assert critical_path_ms(nl, DEFAULT_TECH) == pytest.approx(
            5 * DEFAULT_TECH.gates["NOT"].delay_ms)

    def test_register_to_register_includes_dff(self):
        nl = Netlist("r2r")
        nl.add_input_bus("clk", 1)
        nl.add_input_bus("rst", 1)
        q = nl.reg("blk_q", "blk")
        inv = nl.gate("NOT", (q,), "blk")
        nl.connect_reg(q, inv)
        nl.set_output_bus("y", [q])
        expected = DEFAULT_TECH.gates["DFF"].delay_ms + DEFAULT_TECH.gates["NOT"].delay_ms
        assert critical_path_ms(nl, DEFAULT_TECH) == pytest.approx(expected)

    def test_fmax_independent_of_class_count(self):
        # same m and widths: engine dominates, so n barely moves the clock
        f3 = estimate(build_sequential(_model(3, m=4, seed=1)), 3).f_max_hz
        f10 = estimate(build_sequential(_model(10, m=4, seed=2)), 10).f_max_hz
        assert abs(f3 - f10) / f3 < 0.05


class TestSequentialVsParallel:
    @pytest.mark.parametrize("n", range(3, 11))
    def test_storage_rows_vs_ovo_blocks_ratio(self, n):
        q = _model(n)
        seq = build_sequential(q)
        ovo = build_parallel_baseline(q, "ovo_shape")
        ratio = seq.meta["storage_rows"] / ovo.meta["classifier_blocks"]
        assert ratio == pytest.approx(2.0 / (n - 1))

    def test_multiplier_gate_ratio_at_least_08n(self):
        for n in (3, 6, 10):
            q = _model(n, m=3, seed=n)
            seq = build_sequential(q)
            par = build_parallel_baseline(q, "ovr")
            seq_mul = sum(1 for g in seq.gates
                          if seq.net_names[g.out].startswith("engine_mul"))
            par_mul = sum(1 for g in par.gates if "_mul" in par.net_names[g.out])
            assert par_mul / seq_mul >= 0.8 * n


class TestBattery:
    def _report(self, power):
        return CostReport(1.0, power, 10.0, 10.0, 1, 100.0, power * 0.1, True)

    def test_sequential_peak_within_budget(self):
        assert battery_check(self._report(22.9), 30.0) is True

    def test_parallel_cardio_exceeds(self):
        assert battery_check(self._report(57.4), 30.0) is False

    def test_boundary_inclusive(self):
        assert battery_check(self._report(30.0), 30.0) is True


class TestCompare:
    def test_identical_reports_ratio_one(self):
        r = CostReport(2.0, 3.0, 10.0, 10.0, 3, 300.0, 0.9, True)
        assert compare_designs(r, r) == {"area": 1.0, "power": 1.0, "energy": 1.0}

    def test_cardio_energy_ratio(self):
        ours = refdata.rows_for(refdata.SEQUENTIAL, "cardio")[0]
        base = refdata.rows_for(refdata.PARALLEL, "cardio")[0]
        assert base.energy_mj / ours.energy_mj == pytest.approx(3.14, abs=0.01)

    def test_pendigits_energy_ratio(self):
        ours = refdata.rows_for(refdata.SEQUENTIAL, "pendigits")[0]
        base = refdata.rows_for(refdata.PARALLEL, "pendigits")[0]
        assert base.energy_mj / ours.energy_mj == pytest.approx(14.2, abs=0.05)

    def test_mean_energy_improvement_over_parallel(self):
        ratio = mean_energy_improvement(refdata.energy_by_dataset(refdata.PARALLEL),
                                        refdata.energy_by_dataset(refdata.SEQUENTIAL))
        assert ratio == pytest.approx(10.6, rel=0.01)

    def test_zero_division_rejected(self):
        a = CostReport(0.0, 1.0, 1.0, 1.0, 1, 1.0, 1.0, True)
        with pytest.raises(ValidationError):
            compare_designs(a, a)

    def test_geomean(self):
        tables = [{"energy": 2.0}, {"energy": 8.0}]
        assert geomean_ratios(tables)["energy"] == pytest.approx(4.0)

    def test_no_common_datasets_rejected(self):
        with pytest.raises(ValidationError):
            mean_energy_improvement({"a": 1.0}, {"b": 2.0})


class TestReferenceConstants:
    def test_sequential_power_stats(self):
        powers = [r.power_mw for r in refdata.rows_for(refdata.SEQUENTIAL)]
        assert max(powers) == pytest.approx(22.9)
        assert sum(powers) / len(powers) == pytest.approx(13.58)

    def test_exactly_four_baselines_within_budget(self):
        baselines = [r for r in refdata.REFERENCE_ROWS
                     if r.model != refdata.SEQUENTIAL]
        ok = [r for r in baselines if r.power_mw <= refdata.BATTERY_BUDGET_MW]
        assert len(ok) == 4


class TestTechFile:
    def test_default_complete_and_positive(self):
        for kind, cost in DEFAULT_TECH.gates.items():
            assert cost.area_cm2 > 0 and cost.power_mw > 0 and cost.delay_ms > 0

    def test_negative_entry_rejected(self):
        with pytest.raises(ValidationError):
            GateCost(-1.0, 1.0, 1.0)

    def test_missing_kind_rejected(self):
        gates = dict(DEFAULT_TECH.gates)
        gates.pop("XOR2")
        with pytest.raises(ValidationError, match="XOR2"):
            TechFile("partial", gates)

    def test_json_round_trip(self):
        back = TechFile.from_json(DEFAULT_TECH.to_json())
        assert back.gates == DEFAULT_TECH.gates

    def test_calibration_hits_targets(self, cardio_netlist):
        tech = calibrate_tech(DEFAULT_TECH, cardio_netlist, 3,
                              area_cm2=17.1, power_mw=17.6, f_hz=38.0)
        report = estimate(cardio_netlist, 3, tech)
        assert report.area_cm2 == pytest.approx(17.1, rel=1e-9)
        assert report.power_mw == pytest.approx(17.6, rel=1e-9)
        assert report.f_max_hz == pytest.approx(38.0, rel=1e-9)
