"""Structural Verilog-2001 subset emission and the matching reader.

The subset: built-in gate primitives (and/or/nand/nor/xor/not), ternary
continuous assigns for MUX2, constant assigns for const drivers, one
synchronous-reset always block per DFF, and bus ports. A JSON metadata
comment carries design facts (shape, formats, traced buses) so a re-parsed
file simulates exactly like the in-memory netlist it came from.
"""

import json
import re

from .errors import NetlistError
from .netlist import Netlist

_PRIM_OF = {"AND2": "and", "OR2": "or", "NAND2": "nand", "NOR2": "nor",
            "XOR2": "xor", "NOT": "not"}
_KIND_OF = {v: k for k, v in _PRIM_OF.items()}


def _block_of(name: str) -> str:
    return name.split("_", 1)[0] if "_" in name else name


def emit_hdl(nl: Netlist) -> str:
    """Deterministic structural text; round-trips through parse_hdl."""
    names = nl.net_names
    lines = []
    meta = dict(nl.meta)
    meta["buses"] = {bus: [names[i] for i in nets] for bus, nets in nl.buses.items()}
    lines.append(f"// {nl.name}: generated structural netlist")
    lines.append("// meta: " + json.dumps(meta, sort_keys=True))
    ports = list(nl.inputs) + list(nl.outputs)
    lines.append(f"module {nl.name} ({', '.join(ports)});")

    for name, nets in nl.inputs.items():
        width = len(nets)
        lines.append(f"  input {name};" if width == 1 else f"  input [{width - 1}:0] {name};")
    for name, nets in nl.outputs.items():
        width = len(nets)
        lines.append(f"  output {name};" if width == 1 else f"  output [{width - 1}:0] {name};")

    port_bits = {net for nets in nl.inputs.values() for net in nets}
    reg_bits = {ff.q for ff in nl.dffs}
    wires = sorted(names[i] for i in range(len(names))
                   if i not in port_bits and i not in reg_bits)
    for w in wires:
        lines.append(f"  wire {w};")
    for r in sorted(names[ff.q] for ff in nl.dffs):
        lines.append(f"  reg {r};")

    for bit in sorted(nl.const_nets):
        lines.append(f"  assign {names[nl.const_nets[bit]]} = 1'b{bit};")

    for i, g in enumerate(nl.gates):
        if g.kind == "MUX2":
            sel, d0, d1 = (names[x] for x in g.inputs)
            lines.append(f"  assign {names[g.out]} = {sel} ? {d1} : {d0};")
        else:
            args = ", ".join([names[g.out]] + [names[x] for x in g.inputs])
            lines.append(f"  {_PRIM_OF[g.kind]} g{i} ({args});")

    for ff in nl.dffs:
        q, d = names[ff.q], names[ff.d]
        lines.append(f"  always @(posedge clk) begin if (rst) {q} <= 1'b{ff.reset_value};"
                     f" else {q} <= {d}; end")

    for name, nets in nl.outputs.items():
        if len(nets) == 1:
            lines.append(f"  assign {name} = {names[nets[0]]};")
        else:
            for i, net in enumerate(nets):
                lines.append(f"  assign {name}[{i}] = {names[net]};")

    lines.append("endmodule")
    return "\n".join(lines) + "\n"


_RE_META = re.compile(r"^// meta: (.*)$")
_RE_MODULE = re.compile(r"^module (\w+) \((.*)\);$")
_RE_PORT = re.compile(r"^(input|output) (?:\[(\d+):0\] )?(\w+);$")
_RE_WIRE = re.compile(r"^(wire|reg) (\w+);$")
_RE_CONST = re.compile(r"^assign (\w+) = 1'b([01]);$")
_RE_MUX = re.compile(r"^assign (\S+) = (\S+) \? (\S+) : (\S+);$")
_RE_ALIAS = re.compile(r"^assign (\w+)(?:\[(\d+)\])? = (\S+);$")
_RE_GATE = re.compile(r"^(and|or|nand|nor|xor|not) g\d+ \((.*)\);$")
_RE_DFF = re.compile(r"^always @\(posedge clk\) begin if \(rst\) (\S+) <= 1'b([01]);"
                     r" else \1 <= (\S+); end$")


def parse_hdl(text: str) -> Netlist:
    """Read the emitted subset back into a netlist (blocks recovered from
    the deterministic name prefixes, buses from the metadata comment)."""
    meta = {}
    nl = None
    net_of = {}
    out_decl = {}

    def resolve(token):
        if token not in net_of:
            raise NetlistError(f"reference to undeclared net {token!r}")
        return net_of[token]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line == "endmodule":
            continue
        m = _RE_META.match(line)
        if m:
            meta = json.loads(m.group(1))
            continue
        if line.startswith("//"):
            continue
        m = _RE_MODULE.match(line)
        if m:
            nl = Netlist(m.group(1))
            continue
        if nl is None:
            raise NetlistError(f"line {lineno}: statement before module header")
        m = _RE_PORT.match(line)
        if m:
            direction, hi, name = m.groups()
            width = int(hi) + 1 if hi is not None else 1
            if direction == "input":
                nets = nl.add_input_bus(name, width)
                if width == 1:
                    net_of[name] = nets[0]
                else:
                    for i, net in enumerate(nets):
                        net_of[f"{name}[{i}]"] = net
            else:
                out_decl[name] = [None] * width
            continue
        m = _RE_WIRE.match(line)
        if m:
            _, name = m.groups()
            net_of[name] = nl.new_net(name)
            continue
        m = _RE_CONST.match(line)
        if m:
            name, bit = m.group(1), int(m.group(2))
            nl.const_nets[bit] = resolve(name)
            continue
        m = _RE_GATE.match(line)
        if m:
            prim, args = m.groups()
            tokens = [t.strip() for t in args.split(",")]
            out, ins = resolve(tokens[0]), [resolve(t) for t in tokens[1:]]
            nl.add_gate_raw(_KIND_OF[prim], ins, out, _block_of(tokens[0]))
            continue
        m = _RE_DFF.match(line)
        if m:
            q, reset_value, d = m.group(1), int(m.group(2)), m.group(3)
            nl.add_dff_raw(resolve(d), resolve(q), reset_value, _block_of(q))
            continue
        m = _RE_ALIAS.match(line)
        if m and m.group(1) in out_decl:
            name, idx, src = m.groups()
            out_decl[name][int(idx) if idx is not None else 0] = resolve(src)
            continue
        m = _RE_MUX.match(line)
        if m:
            out, sel, d1, d0 = m.groups()
            nl.add_gate_raw("MUX2", (resolve(sel), resolve(d0), resolve(d1)),
                            resolve(out), _block_of(out))
            continue
        raise NetlistError(f"line {lineno}: cannot parse {line!r}")

    if nl is None:
        raise NetlistError("no module found")
    for name, nets in out_decl.items():
        if any(net is None for net in nets):
            raise NetlistError(f"output {name} has unassigned bits")
        nl.set_output_bus(name, nets)
    buses = meta.pop("buses", {})
    nl.buses = {bus: [resolve(t) for t in names] for bus, names in buses.items()}
    nl.meta = meta
    return nl.validate()
