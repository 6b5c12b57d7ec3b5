"""Cycle-accurate, bit-exact netlist simulation and differential checking.

Two-phase semantics per cycle: settle all combinational gates in
topological order, then clock every DFF at once. Gate values are Python
ints used as bit vectors across a whole batch of samples, so one pass
simulates every test sample simultaneously (control logic is
input-independent, so the schedule is shared).
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import SimulationError, ValidationError
from .netlist import Netlist
from .quantizer import QuantizedSvm, raw_inputs


@dataclass
class CycleRecord:
    cycle: int
    counter: int
    row_bits: int
    acc_raw: int       # signed engine accumulator
    score_raw: int     # signed voter score register (state entering the cycle)
    id_value: int
    done: bool


@dataclass
class SimTrace:
    cycles: list
    done_cycle: int
    final_class: int


def write_trace_csv(trace: SimTrace, path):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["cycle", "counter", "score_raw", "id", "done"])
        for c in trace.cycles:
            writer.writerow([c.cycle, c.counter, c.score_raw, c.id_value, int(c.done)])
        last = trace.cycles[-1]
        writer.writerow([trace.done_cycle, last.counter, last.score_raw,
                         trace.final_class, 1])


class _Compiled:
    def __init__(self, nl: Netlist):
        nl.validate()
        order = nl.topo_order()
        self.ops = [(g.kind, g.inputs, g.out) for g in (nl.gates[i] for i in order)]
        self.dffs = [(ff.d, ff.q, ff.reset_value) for ff in nl.dffs]
        self.net_count = nl.net_count()
        self.const_nets = dict(nl.const_nets)


def _settle(values, ops, mask):
    for kind, ins, out in ops:
        if kind == "AND2":
            v = values[ins[0]] & values[ins[1]]
        elif kind == "OR2":
            v = values[ins[0]] | values[ins[1]]
        elif kind == "XOR2":
            v = values[ins[0]] ^ values[ins[1]]
        elif kind == "NOT":
            v = values[ins[0]] ^ mask
        elif kind == "NAND2":
            v = (values[ins[0]] & values[ins[1]]) ^ mask
        elif kind == "NOR2":
            v = (values[ins[0]] | values[ins[1]]) ^ mask
        else:  # MUX2: (sel, d0, d1)
            s = values[ins[0]]
            v = (s & values[ins[2]]) | ((s ^ mask) & values[ins[1]])
        values[out] = v


def _pack_inputs(nl, x_matrix, batch):
    """Bit-pack raw input integers across the batch into per-net ints."""
    meta = nl.meta
    fmt = meta.get("input_format")
    if fmt is None:
        raise ValidationError("netlist metadata lacks input_format")
    u = fmt["integer_bits"] + fmt["fraction_bits"] + (1 if fmt["signed"] else 0)
    x_nets = nl.inputs.get("x")
    if x_nets is None or len(x_nets) != meta["m"] * u:
        raise ValidationError("input port width does not match m * input bits")
    values = {}
    x = np.asarray(x_matrix, dtype=np.int64)
    if x.shape != (batch, meta["m"]):
        raise ValidationError(f"expected raw input shape {(batch, meta['m'])}")
    if x.size and (x.min() < 0 or x.max() >> u):
        raise ValidationError(f"raw inputs must fit {u} unsigned bits")
    for i in range(meta["m"]):
        col = x[:, i]
        for j in range(u):
            bits = ((col >> j) & 1).astype(np.uint8)
            packed = int.from_bytes(np.packbits(bits, bitorder="little").tobytes(),
                                    "little")
            values[x_nets[i * u + j]] = packed
    return values


def _unpack_bus(values, nets, batch):
    """Per-sample unsigned integers from a list of bit nets (LSB first)."""
    nbytes = (batch + 7) // 8
    out = np.zeros(batch, dtype=np.int64)
    for k, net in enumerate(nets):
        raw = values[net] & ((1 << batch) - 1)
        bits = np.unpackbits(np.frombuffer(raw.to_bytes(nbytes, "little"),
                                           dtype=np.uint8), bitorder="little")[:batch]
        out |= bits.astype(np.int64) << k
    return out


def _signed_bus(values, nets, batch):
    raw = _unpack_bus(values, nets, batch)
    width = len(nets)
    sign = 1 << (width - 1)
    return np.where(raw & sign, raw - (1 << width), raw)


def _run_batch(nl: Netlist, x_matrix, max_cycles=None, record_trace=False):
    """Simulate until done; returns (classes, acc_by_cycle, trace records)."""
    if nl.meta.get("kind") != "sequential":
        raise ValidationError("batch simulation expects a sequential design")
    n = nl.meta["n"]
    if max_cycles is None:
        max_cycles = n + 2
    if max_cycles < n:
        raise ValidationError("max_cycles must be at least the class count")
    batch = len(x_matrix)
    if batch == 0:
        raise ValidationError("need at least one input sample")
    mask = (1 << batch) - 1
    comp = _Compiled(nl)
    values = [0] * comp.net_count
    for net, packed in _pack_inputs(nl, x_matrix, batch).items():
        values[net] = packed
    for bit, net in comp.const_nets.items():
        values[net] = mask if bit else 0
    for _, q, reset_value in comp.dffs:
        values[q] = mask if reset_value else 0

    done_net = nl.buses["done"][0]
    acc_nets = nl.buses["engine_acc"]
    count_nets = nl.buses["control_count"]
    score_nets = nl.buses["voter_score"]
    id_nets = nl.buses["voter_id"]
    row_nets = nl.buses["storage_row"]

    acc_by_cycle = []
    records = []
    for cycle in range(max_cycles + 1):
        _settle(values, comp.ops, mask)
        done_val = values[done_net] & mask
        if done_val == mask:
            classes = _unpack_bus(values, id_nets, batch)
            return classes, acc_by_cycle, records, cycle
        if done_val != 0:
            raise SimulationError("done flag diverged across the batch")
        if cycle >= max_cycles:
            break
        acc_by_cycle.append(_signed_bus(values, acc_nets, batch))
        if record_trace:
            records.append(CycleRecord(
                cycle=cycle,
                counter=int(_unpack_bus(values, count_nets, batch)[0]),
                row_bits=int(_unpack_bus(values, row_nets, 1)[0]),
                acc_raw=int(acc_by_cycle[-1][0]),
                score_raw=int(_signed_bus(values, score_nets, batch)[0]),
                id_value=int(_unpack_bus(values, id_nets, batch)[0]),
                done=False,
            ))
        new_q = [(q, values[d]) for d, q, _ in comp.dffs]
        for q, v in new_q:
            values[q] = v
    raise SimulationError(f"done not asserted within {max_cycles} cycles")


def simulate(nl: Netlist, x_raw, max_cycles=None):
    """Run one sample; returns (class index, full per-cycle trace)."""
    classes, _, records, done_cycle = _run_batch(nl, [list(x_raw)], max_cycles,
                                                 record_trace=True)
    trace = SimTrace(records, done_cycle, int(classes[0]))
    return int(classes[0]), trace


def simulate_batch(nl: Netlist, x_matrix, max_cycles=None):
    """Run many samples at once; returns (classes, acc matrix [cycle][sample])."""
    classes, acc_by_cycle, _, _ = _run_batch(nl, x_matrix, max_cycles)
    return classes, acc_by_cycle


def measured_latency_cycles(trace: SimTrace) -> int:
    """Clock cycles from reset release to the done flag."""
    return trace.done_cycle


def eval_combinational(nl: Netlist, port_values: dict) -> dict:
    """Settle a combinational design once.

    `port_values` maps input port name to an unsigned integer (bit i of the
    value drives bus bit i); returns the same encoding for output ports.
    """
    if nl.dffs:
        raise ValidationError("design is sequential; use simulate()")
    comp = _Compiled(nl)
    values = [0] * comp.net_count
    for name, nets in nl.inputs.items():
        v = int(port_values.get(name, 0))
        if v < 0 or v >> len(nets):
            raise ValidationError(f"value for port {name} exceeds its width")
        for k, net in enumerate(nets):
            values[net] = (v >> k) & 1
    for bit, net in comp.const_nets.items():
        values[net] = bit
    _settle(values, comp.ops, 1)
    return {name: sum((values[net] & 1) << k for k, net in enumerate(nets))
            for name, nets in nl.outputs.items()}


def feature_bus_value(nl: Netlist, x_raw) -> int:
    """Pack per-feature raw integers into the x input bus encoding."""
    fmt = nl.meta["input_format"]
    u = fmt["integer_bits"] + fmt["fraction_bits"] + (1 if fmt["signed"] else 0)
    value = 0
    for i, raw in enumerate(x_raw):
        if raw < 0 or raw >> u:
            raise ValidationError(f"raw input {raw} exceeds {u} bits")
        value |= int(raw) << (i * u)
    return value


def baseline_classify(nl: Netlist, x_raw) -> int:
    """Class output of a combinational baseline design for one sample."""
    return eval_combinational(nl, {"x": feature_bus_value(nl, x_raw)})["class_id"]


@dataclass
class EquivalenceReport:
    samples: int
    cycles: int
    class_mismatches: int
    accumulator_mismatches: int
    accumulator_agreement: float
    counterexamples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.class_mismatches == 0 and self.accumulator_mismatches == 0

    def to_json(self):
        return {
            "samples": self.samples,
            "cycles": self.cycles,
            "class_mismatches": self.class_mismatches,
            "accumulator_mismatches": self.accumulator_mismatches,
            "accumulator_agreement": self.accumulator_agreement,
            "passed": self.passed,
            "counterexamples": self.counterexamples,
        }


def equivalence_check(q: QuantizedSvm, nl: Netlist, data, max_counterexamples=5,
                      x_raw_matrix=None) -> EquivalenceReport:
    """Differential check of the netlist against the integer golden model.

    Every sample's class output must match the golden argmax (smallest
    index on ties), and every per-cycle accumulator must equal the golden
    integer score exactly; zero tolerance.
    """
    if x_raw_matrix is None:
        x_raw_matrix = raw_inputs(data, q.input_format)
    x_raw_matrix = np.asarray(x_raw_matrix, dtype=np.int64)
    samples = x_raw_matrix.shape[0]
    golden = x_raw_matrix @ q.weights.T + q.biases   # (samples, n), exact
    golden_class = np.argmax(golden, axis=1)

    classes, acc_by_cycle = simulate_batch(nl, x_raw_matrix)
    cycles = len(acc_by_cycle)
    counterexamples = []
    acc_bad = 0
    for k, acc in enumerate(acc_by_cycle):
        diff = np.nonzero(acc != golden[:, k])[0]
        acc_bad += diff.size
        for s in diff[:max(0, max_counterexamples - len(counterexamples))]:
            counterexamples.append({
                "sample": int(s), "cycle": k,
                "expected_raw": int(golden[s, k]), "observed_raw": int(acc[s]),
            })
    class_bad = np.nonzero(classes != golden_class)[0]
    for s in class_bad[:max(0, max_counterexamples - len(counterexamples))]:
        counterexamples.append({
            "sample": int(s), "cycle": cycles,
            "expected_class": int(golden_class[s]), "observed_class": int(classes[s]),
        })
    total_cells = samples * cycles
    return EquivalenceReport(
        samples=samples,
        cycles=cycles,
        class_mismatches=int(class_bad.size),
        accumulator_mismatches=int(acc_bad),
        accumulator_agreement=1.0 if total_cells == 0 else 1.0 - acc_bad / total_cells,
        counterexamples=counterexamples,
    )
