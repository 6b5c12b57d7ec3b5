"""Exhaustive checks of the gate-level arithmetic blocks against integer
semantics, with operands driven from ports so every value combination is
swept."""

import pytest

from printed_svm.circuitgen import (_Ctx, _adder_tree, _comparator_gt_signed,
                                    _equals_const, _incrementer, _multiplier,
                                    _ripple_adder, _sign_extend)
from printed_svm.netlist import Netlist
from printed_svm.simulator import eval_combinational
from printed_svm.util import to_signed


def _harness(widths, build):
    """Netlist with one input bus per operand; `build` wires the outputs."""
    nl = Netlist("harness")
    ctx = _Ctx(nl)
    buses = [nl.add_input_bus(f"op{i}", w) for i, w in enumerate(widths)]
    build(nl, ctx, buses)
    return nl


class TestRippleAdder:
    @pytest.mark.parametrize("k", [1, 3, 5])
    def test_exhaustive_with_carry(self, k):
        def build(nl, ctx, buses):
            s, cout = _ripple_adder(ctx, buses[0], buses[1], buses[2][0], "blk")
            nl.set_output_bus("s", s)
            nl.set_output_bus("cout", [cout])

        nl = _harness([k, k, 1], build)
        for a in range(1 << k):
            for b in range(1 << k):
                for cin in (0, 1):
                    out = eval_combinational(nl, {"op0": a, "op1": b, "op2": cin})
                    total = a + b + cin
                    assert out["s"] == total % (1 << k)
                    assert out["cout"] == total >> k


class TestMultiplier:
    @pytest.mark.parametrize("u,wb", [(1, 1), (2, 3), (4, 4), (3, 5)])
    def test_exhaustive_unsigned_times_signed(self, u, wb):
        def build(nl, ctx, buses):
            nl.set_output_bus("p", _multiplier(ctx, buses[0], buses[1], "blk", "blk_mul"))

        nl = _harness([u, wb], build)
        for x in range(1 << u):
            for w_raw in range(1 << wb):
                w = to_signed(w_raw, wb)
                p = eval_combinational(nl, {"op0": x, "op1": w_raw})["p"]
                assert to_signed(p, u + wb) == x * w, (x, w)


class TestComparator:
    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_exhaustive_signed_greater(self, k):
        def build(nl, ctx, buses):
            nl.set_output_bus("gt", [_comparator_gt_signed(ctx, buses[0], buses[1], "blk")])

        nl = _harness([k, k], build)
        for a_raw in range(1 << k):
            for b_raw in range(1 << k):
                got = eval_combinational(nl, {"op0": a_raw, "op1": b_raw})["gt"]
                assert got == int(to_signed(a_raw, k) > to_signed(b_raw, k))


class TestIncrementer:
    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_wraps_modulo(self, k):
        def build(nl, ctx, buses):
            nl.set_output_bus("inc", _incrementer(ctx, buses[0], "blk"))

        nl = _harness([k], build)
        for v in range(1 << k):
            assert eval_combinational(nl, {"op0": v})["inc"] == (v + 1) % (1 << k)


class TestEqualsConst:
    @pytest.mark.parametrize("k,target", [(1, 1), (3, 5), (4, 0), (4, 15)])
    def test_matches_only_target(self, k, target):
        def build(nl, ctx, buses):
            nl.set_output_bus("eq", [_equals_const(ctx, buses[0], target, "blk")])

        nl = _harness([k], build)
        for v in range(1 << k):
            assert eval_combinational(nl, {"op0": v})["eq"] == int(v == target)


class TestPrimitiveSemantics:
    def test_all_gate_kinds_truth_tables(self):
        from printed_svm.verilog import emit_hdl, parse_hdl

        def build_all(nl):
            a = nl.add_input_bus("a", 1)[0]
            b = nl.add_input_bus("b", 1)[0]
            outs = {
                "and2": nl.gate("AND2", (a, b), "blk"),
                "or2": nl.gate("OR2", (a, b), "blk"),
                "nand2": nl.gate("NAND2", (a, b), "blk"),
                "nor2": nl.gate("NOR2", (a, b), "blk"),
                "xor2": nl.gate("XOR2", (a, b), "blk"),
                "inv": nl.gate("NOT", (a,), "blk"),
                "mux": nl.gate("MUX2", (a, nl.const(0), b), "blk"),
            }
            for name, net in outs.items():
                nl.set_output_bus(name, [net])

        nl = Netlist("prims")
        build_all(nl)
        reparsed = parse_hdl(emit_hdl(nl))
        for design in (nl, reparsed):
            for a in (0, 1):
                for b in (0, 1):
                    out = eval_combinational(design, {"a": a, "b": b})
                    assert out["and2"] == (a & b)
                    assert out["or2"] == (a | b)
                    assert out["nand2"] == 1 - (a & b)
                    assert out["nor2"] == 1 - (a | b)
                    assert out["xor2"] == (a ^ b)
                    assert out["inv"] == 1 - a
                    assert out["mux"] == (b if a else 0)


class TestAdderTree:
    def test_signed_multi_operand_sum(self):
        width, operands = 6, 5

        def build(nl, ctx, buses):
            nl.set_output_bus("sum", _adder_tree(ctx, buses, "blk"))

        nl = _harness([width] * operands, build)
        cases = [(1, 2, 3, 4, 5), (31, 31, 31, 0, 0), (63, 63, 63, 63, 63),
                 (32, 32, 32, 32, 32), (17, 45, 9, 60, 33)]
        for vals in cases:
            out = eval_combinational(nl, {f"op{i}": v for i, v in enumerate(vals)})
            expected = sum(to_signed(v, width) for v in vals)
            # tree works modulo 2^width; all cases chosen to stay in range
            if -(1 << (width - 1)) <= expected < (1 << (width - 1)):
                assert to_signed(out["sum"], width) == expected

    def test_sign_extension_preserves_value(self):
        def build(nl, ctx, buses):
            ext = _sign_extend(buses[0], 8)
            tree = _adder_tree(ctx, [ext, [nl.const(0)] * 8], "blk")
            nl.set_output_bus("v", tree)

        nl = _harness([4], build)
        for raw in range(16):
            out = eval_combinational(nl, {"op0": raw})["v"]
            assert to_signed(out, 8) == to_signed(raw, 4)
