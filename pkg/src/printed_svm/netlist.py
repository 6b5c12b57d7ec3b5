"""Gate-level netlist: primitive gates, DFFs, ports, structural checks."""

from dataclasses import dataclass

from .errors import NetlistError, ValidationError

GATE_KINDS = ("AND2", "OR2", "NAND2", "NOR2", "XOR2", "NOT", "MUX2")
GATE_ARITY = {"AND2": 2, "OR2": 2, "NAND2": 2, "NOR2": 2, "XOR2": 2, "NOT": 1,
              "MUX2": 3}  # MUX2 inputs: (sel, d0, d1); out = d1 when sel else d0


@dataclass
class Gate:
    kind: str
    inputs: tuple
    out: int
    block: str


@dataclass
class Dff:
    d: int
    q: int
    reset_value: int
    block: str


@dataclass
class GateCensus:
    counts: dict          # per primitive kind, including "DFF"
    total: int
    by_block: dict        # block -> {kind: count}

    def to_json(self):
        return {"counts": self.counts, "total": self.total, "by_block": self.by_block}

    def __add__(self, other):
        counts = dict(self.counts)
        for k, v in other.counts.items():
            counts[k] = counts.get(k, 0) + v
        by_block = {b: dict(kinds) for b, kinds in self.by_block.items()}
        for b, kinds in other.by_block.items():
            tgt = by_block.setdefault(b, {})
            for k, v in kinds.items():
                tgt[k] = tgt.get(k, 0) + v
        return GateCensus(counts, self.total + other.total, by_block)


class Netlist:
    """Single-clock gate-level design.

    Nets are integer ids; every net has exactly one driver (primary input,
    constant, gate output, or DFF Q). Combinational logic must be acyclic;
    feedback is only allowed through DFFs. clk/rst are not modeled as gate
    inputs; they exist as ports and in DFF semantics.
    """

    def __init__(self, name: str):
        self.name = name
        self.net_names = []
        self.gates = []
        self.dffs = []
        self.inputs = {}    # port name -> [net ids]
        self.outputs = {}   # port name -> [net ids] (aliases of internal nets)
        self.buses = {}     # traced internal buses, name -> [net ids]
        self.meta = {}
        self.const_nets = {}     # bit value -> net id
        self._dff_q = set()
        self._topo_cache = None

    # -- construction -----------------------------------------------------

    def new_net(self, name: str) -> int:
        nid = len(self.net_names)
        self.net_names.append(name)
        self._topo_cache = None
        return nid

    def add_input_bus(self, name: str, width: int):
        if width == 1:
            nets = [self.new_net(name)]
        else:
            nets = [self.new_net(f"{name}[{i}]") for i in range(width)]
        self.inputs[name] = nets
        return nets

    def set_output_bus(self, name: str, nets):
        self.outputs[name] = list(nets)

    def const(self, bit: int) -> int:
        if bit not in (0, 1):
            raise ValidationError("constant must be 0 or 1")
        if bit not in self.const_nets:
            self.const_nets[bit] = self.new_net(f"const{bit}")
        return self.const_nets[bit]

    def gate(self, kind: str, inputs, block: str, name=None) -> int:
        if kind not in GATE_ARITY:
            raise ValidationError(f"unknown gate kind {kind}")
        inputs = tuple(inputs)
        if len(inputs) != GATE_ARITY[kind]:
            raise ValidationError(f"{kind} takes {GATE_ARITY[kind]} inputs")
        out = self.new_net(name if name else f"{block}_w{len(self.net_names)}")
        self.gates.append(Gate(kind, inputs, out, block))
        return out

    def add_gate_raw(self, kind: str, inputs, out: int, block: str):
        """Attach a gate driving an existing net (netlist readers use this)."""
        if kind not in GATE_ARITY or len(tuple(inputs)) != GATE_ARITY[kind]:
            raise ValidationError(f"bad gate {kind} arity")
        self.gates.append(Gate(kind, tuple(inputs), out, block))
        self._topo_cache = None

    def add_dff_raw(self, d: int, q: int, reset_value: int, block: str):
        self.dffs.append(Dff(d=d, q=q, reset_value=reset_value, block=block))
        self._dff_q.add(q)

    def reg(self, name: str, block: str, reset_value: int = 0) -> int:
        """Create a DFF with its Q net; bind D later with connect_reg."""
        q = self.new_net(name)
        self.add_dff_raw(-1, q, reset_value, block)
        return q

    def connect_reg(self, q: int, d: int):
        for ff in self.dffs:
            if ff.q == q:
                ff.d = d
                return
        raise ValidationError(f"net {q} is not a register output")

    # -- analysis ----------------------------------------------------------

    def net_count(self) -> int:
        return len(self.net_names)

    def driver_map(self):
        """net id -> driver tag; raises on multiple drivers."""
        drivers = {}

        def claim(net, tag):
            if net in drivers:
                raise NetlistError(
                    f"net {self.net_names[net]!r} has drivers {drivers[net]} and {tag}")
            drivers[net] = tag

        for name, nets in self.inputs.items():
            for net in nets:
                claim(net, ("input", name))
        for bit, net in self.const_nets.items():
            claim(net, ("const", bit))
        for i, g in enumerate(self.gates):
            claim(g.out, ("gate", i))
        for i, ff in enumerate(self.dffs):
            claim(ff.q, ("dff", i))
        return drivers

    def topo_order(self):
        """Gate indices in combinational evaluation order (DFF Q = source)."""
        if self._topo_cache is not None:
            return self._topo_cache
        consumers = {}  # net -> [gate indices consuming it]
        indeg = [0] * len(self.gates)
        gate_out = {}
        for i, g in enumerate(self.gates):
            gate_out[g.out] = i
        for i, g in enumerate(self.gates):
            for net in g.inputs:
                if net in gate_out:
                    consumers.setdefault(net, []).append(i)
                    indeg[i] += 1
        ready = [i for i, d in enumerate(indeg) if d == 0]
        order = []
        while ready:
            i = ready.pop()
            order.append(i)
            for j in consumers.get(self.gates[i].out, ()):
                indeg[j] -= 1
                if indeg[j] == 0:
                    ready.append(j)
        if len(order) != len(self.gates):
            raise NetlistError("combinational cycle detected")
        self._topo_cache = order
        return order

    def validate(self):
        """One-driver rule, dangling inputs, DFF binding, acyclicity."""
        drivers = self.driver_map()
        for g in self.gates:
            for net in g.inputs:
                if net not in drivers:
                    raise NetlistError(f"gate input {self.net_names[net]!r} has no driver")
        for ff in self.dffs:
            if ff.d < 0:
                raise NetlistError(f"register {self.net_names[ff.q]!r} has unbound D")
            if ff.d not in drivers:
                raise NetlistError(f"register D {self.net_names[ff.d]!r} has no driver")
        for name, nets in self.outputs.items():
            for net in nets:
                if net not in drivers:
                    raise NetlistError(f"output {name} references undriven net")
        self.topo_order()
        return self

    def census(self) -> GateCensus:
        counts = {}
        by_block = {}
        for g in self.gates:
            counts[g.kind] = counts.get(g.kind, 0) + 1
            by_block.setdefault(g.block, {})
            by_block[g.block][g.kind] = by_block[g.block].get(g.kind, 0) + 1
        for ff in self.dffs:
            counts["DFF"] = counts.get("DFF", 0) + 1
            by_block.setdefault(ff.block, {})
            by_block[ff.block]["DFF"] = by_block[ff.block].get("DFF", 0) + 1
        total = len(self.gates) + len(self.dffs)
        return GateCensus(counts, total, by_block)

    def blocks(self):
        seen = []
        for g in self.gates:
            if g.block not in seen:
                seen.append(g.block)
        for ff in self.dffs:
            if ff.block not in seen:
                seen.append(ff.block)
        return seen
