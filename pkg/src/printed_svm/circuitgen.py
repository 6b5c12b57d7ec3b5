"""Lower a quantized OvR SVM to gate-level netlists.

Sequential design: a ceil(log2(n))-bit control counter walks the n stored
parameter rows (constant-folded MUX storage); a shared engine of m
multipliers and a balanced ripple-carry adder tree computes one weighted
sum per cycle; a sequential-argmax voter (score register, id register, one
signed comparator) tracks the winner; done asserts the cycle after the
last update and the outputs hold until reset.

Parallel baseline: n (or n(n-1)/2 shape-only pairwise) hardwired
weighted-sum blocks plus a combinational argmax tree; used for
resource-ratio comparisons.
"""

from dataclasses import dataclass

from .errors import ValidationError
from .netlist import Netlist
from .quantizer import QuantizedSvm
from .trainer import classifier_count
from .util import ceil_log2, sha256_text, stable_json


class _Ctx:
    """Build helper: NOT-gate reuse plus MUX folding memo."""

    def __init__(self, nl: Netlist):
        self.nl = nl
        self.not_cache = {}
        self.mux_memo = {}

    def g(self, kind, inputs, block, prefix=None):
        name = f"{prefix or block}_w{self.nl.net_count()}"
        return self.nl.gate(kind, inputs, block, name=name)

    def inv(self, a, block, prefix=None):
        if a not in self.not_cache:
            self.not_cache[a] = self.g("NOT", (a,), block, prefix)
        return self.not_cache[a]

    def mux(self, sel, d0, d1, block, prefix=None):
        return self.g("MUX2", (sel, d0, d1), block, prefix)


# -- arithmetic building blocks ---------------------------------------------

def _full_adder(ctx, a, b, cin, block, prefix=None):
    s1 = ctx.g("XOR2", (a, b), block, prefix)
    total = ctx.g("XOR2", (s1, cin), block, prefix)
    c1 = ctx.g("AND2", (a, b), block, prefix)
    c2 = ctx.g("AND2", (s1, cin), block, prefix)
    cout = ctx.g("OR2", (c1, c2), block, prefix)
    return total, cout


def _ripple_adder(ctx, a_bits, b_bits, cin, block, prefix=None):
    """k-bit ripple-carry adder: k full adders, LSB first."""
    if len(a_bits) != len(b_bits):
        raise ValidationError("ripple adder operands must match in width")
    out = []
    carry = cin
    for a, b in zip(a_bits, b_bits):
        s, carry = _full_adder(ctx, a, b, carry, block, prefix)
        out.append(s)
    return out, carry


def _sign_extend(bits, width):
    if len(bits) > width:
        raise ValidationError("cannot extend to a narrower width")
    return list(bits) + [bits[-1]] * (width - len(bits))


def _multiplier(ctx, x_bits, w_bits, block, prefix):
    """Array multiplier, unsigned x times signed w, product u+w bits.

    w is sign-extended to the product width; partial-product rows are
    accumulated with ripple adders in two's complement (mod 2^P), which is
    exact because every partial sum fits the product width.
    """
    u = len(x_bits)
    p_width = u + len(w_bits)
    w_ext = _sign_extend(w_bits, p_width)
    acc = [ctx.g("AND2", (x_bits[0], w_ext[j]), block, prefix) for j in range(p_width)]
    for i in range(1, u):
        pp = [ctx.g("AND2", (x_bits[i], w_ext[j]), block, prefix)
              for j in range(p_width - i)]
        upper, _ = _ripple_adder(ctx, acc[i:], pp, ctx.nl.const(0), block, prefix)
        acc = acc[:i] + upper
    return acc


def _adder_tree(ctx, operands, block, prefix=None):
    """Balanced tree of ripple-carry adders over equal-width operands."""
    ops = [list(o) for o in operands]
    while len(ops) > 1:
        nxt = []
        for i in range(0, len(ops) - 1, 2):
            s, _ = _ripple_adder(ctx, ops[i], ops[i + 1], ctx.nl.const(0), block, prefix)
            nxt.append(s)
        if len(ops) % 2:
            nxt.append(ops[-1])
        ops = nxt
    return ops[0]


def _comparator_gt_signed(ctx, a_bits, b_bits, block, prefix=None):
    """Single signed comparator: returns net asserting a > b.

    Computes b - a in width+1 bits (sign-extended); its sign bit is a > b.
    """
    if len(a_bits) != len(b_bits):
        raise ValidationError("comparator operands must match in width")
    a_ext = list(a_bits) + [a_bits[-1]]
    b_ext = list(b_bits) + [b_bits[-1]]
    a_inv = [ctx.inv(a, block, prefix) for a in a_ext]
    diff, _ = _ripple_adder(ctx, b_ext, a_inv, ctx.nl.const(1), block, prefix)
    return diff[-1]


def _incrementer(ctx, bits, block, prefix=None):
    """bits + 1 modulo 2^len(bits)."""
    out = [ctx.inv(bits[0], block, prefix)]
    carry = bits[0]
    for i in range(1, len(bits)):
        out.append(ctx.g("XOR2", (bits[i], carry), block, prefix))
        if i < len(bits) - 1:
            carry = ctx.g("AND2", (bits[i], carry), block, prefix)
    return out


def _equals_const(ctx, bits, value, block, prefix=None):
    """AND tree matching a bit vector against a constant."""
    terms = []
    for i, net in enumerate(bits):
        if (value >> i) & 1:
            terms.append(net)
        else:
            terms.append(ctx.inv(net, block, prefix))
    while len(terms) > 1:
        nxt = []
        for i in range(0, len(terms) - 1, 2):
            nxt.append(ctx.g("AND2", (terms[i], terms[i + 1]), block, prefix))
        if len(terms) % 2:
            nxt.append(terms[-1])
        terms = nxt
    return terms[0]


# -- constant-folded MUX storage ---------------------------------------------

@dataclass
class StorageSpec:
    """n rows of hardwired parameter bits; row k = concat(w_k1..w_km, b_k),
    LSB-first fields."""
    rows: list
    row_width: int

    def __post_init__(self):
        if not self.rows:
            raise ValidationError("storage needs at least one row")
        if self.row_width < 1:
            raise ValidationError("row width must be >= 1")
        for r in self.rows:
            if r < 0 or r >> self.row_width:
                raise ValidationError("row pattern exceeds row width")

    @property
    def n(self) -> int:
        return len(self.rows)


def storage_spec(q: QuantizedSvm) -> StorageSpec:
    wb = q.weight_format.total_bits
    bb = q.bias_format.total_bits
    wmask = (1 << wb) - 1
    bmask = (1 << bb) - 1
    rows = []
    for k in range(q.n):
        row = 0
        for i in range(q.m):
            row |= (int(q.weights[k, i]) & wmask) << (i * wb)
        row |= (int(q.biases[k]) & bmask) << (q.m * wb)
        rows.append(row)
    return StorageSpec(rows, q.m * wb + bb)


_CONST0 = ("c", 0)
_CONST1 = ("c", 1)


def fold_mux_constants(nl: Netlist, spec: StorageSpec, select_nets, block="storage",
                       ctx=None):
    """Per output bit, a simplified select-line function of the hardwired rows.

    Leaves beyond row n-1 repeat the last row. Simplification rules, applied
    bottom-up: mux(s,a,a)=a, mux(s,0,1)=s, mux(s,1,0)=not s; identical
    (sel, d0, d1) subtrees are shared. Bits constant across all rows become
    constant drivers and cost zero gates.
    """
    if ctx is None:
        ctx = _Ctx(nl)
    n_leaves = 1 << len(select_nets)
    if n_leaves < spec.n:
        raise ValidationError("not enough select lines for the row count")

    def fold(leaves, selects):
        if len(leaves) == 1:
            return leaves[0]
        half = len(leaves) // 2
        sel = selects[-1]
        low = fold(leaves[:half], selects[:-1])
        high = fold(leaves[half:], selects[:-1])
        if low == high:
            return low
        if low == _CONST0 and high == _CONST1:
            return sel
        if low == _CONST1 and high == _CONST0:
            return ctx.inv(sel, block)
        key = (sel, low, high)
        if key not in ctx.mux_memo:
            d0 = nl.const(low[1]) if isinstance(low, tuple) else low
            d1 = nl.const(high[1]) if isinstance(high, tuple) else high
            ctx.mux_memo[key] = ctx.mux(sel, d0, d1, block)
        return ctx.mux_memo[key]

    outputs = []
    for j in range(spec.row_width):
        leaves = [_CONST1 if (spec.rows[min(r, spec.n - 1)] >> j) & 1 else _CONST0
                  for r in range(n_leaves)]
        res = fold(leaves, list(select_nets))
        outputs.append(nl.const(res[1]) if isinstance(res, tuple) else res)
    return outputs


def naive_mux_gate_count(spec: StorageSpec, select_count: int) -> int:
    """MUX2 count of the unfolded tree: (2^S - 1) per output bit."""
    return spec.row_width * ((1 << select_count) - 1)


def build_storage_netlist(spec: StorageSpec, name="storage_only") -> Netlist:
    """Standalone storage block with a select input, for equivalence tests."""
    sel_width = max(1, ceil_log2(spec.n))
    nl = Netlist(name)
    sel = nl.add_input_bus("sel", sel_width)
    row = fold_mux_constants(nl, spec, sel)
    nl.set_output_bus("row", row)
    nl.buses["storage_row"] = row
    nl.meta = {"kind": "storage", "row_width": spec.row_width,
               "rows": spec.n, "select_width": sel_width,
               "blocks": ["storage"], "name": name}
    return nl.validate()


# -- full designs -------------------------------------------------------------

def _design_meta(q: QuantizedSvm, kind, name, **extra):
    meta = {
        "kind": kind,
        "name": name,
        "n": q.n,
        "m": q.m,
        "input_format": q.input_format.to_json(),
        "weight_format": q.weight_format.to_json(),
        "bias_format": q.bias_format.to_json(),
        "acc_width": q.accumulator_width,
        "model_hash": sha256_text(stable_json(q.to_json()))[:16],
    }
    meta.update(extra)
    return meta


def _weighted_sum(ctx, x_nets, w_bits_per_feature, bias_bits, acc_width, block,
                  mul_prefix):
    """m multipliers plus balanced adder tree plus bias operand."""
    operands = []
    for i, w_bits in enumerate(w_bits_per_feature):
        prod = _multiplier(ctx, x_nets[i], w_bits, block, f"{mul_prefix}{i}")
        operands.append(_sign_extend(prod, acc_width))
    operands.append(_sign_extend(bias_bits, acc_width))
    return _adder_tree(ctx, operands, block)


def _const_bits(nl, raw, width):
    return [nl.const((raw >> j) & 1) for j in range(width)]


def build_sequential(q: QuantizedSvm, name=None) -> Netlist:
    """Lower to the sequential architecture: control, storage, engine, voter."""
    if q.n < 2:
        raise ValidationError("circuit generation needs at least 2 classes")
    n, m = q.n, q.m
    u = q.input_format.total_bits
    wb = q.weight_format.total_bits
    bb = q.bias_format.total_bits
    acc_w = q.accumulator_width
    ctr_w = ceil_log2(n)
    design_name = name or (f"seq_svm_{q.name}" if q.name else "seq_svm")

    nl = Netlist(design_name)
    ctx = _Ctx(nl)
    x = nl.add_input_bus("x", m * u)
    nl.add_input_bus("clk", 1)
    nl.add_input_bus("rst", 1)

    # control: counter, terminal count, sticky done; counter holds once done
    count = [nl.reg(f"control_count_b{k}", "control") for k in range(ctr_w)]
    done = nl.reg("control_done", "control")
    inc = _incrementer(ctx, count, "control")
    tc = _equals_const(ctx, count, n - 1, "control")
    nl.connect_reg(done, ctx.g("OR2", (done, tc), "control"))
    not_done = ctx.inv(done, "control")
    for k in range(ctr_w):
        nl.connect_reg(count[k], ctx.mux(done, inc[k], count[k], "control"))

    # storage: constant-folded MUX rows selected by the counter
    spec = storage_spec(q)
    row = fold_mux_constants(nl, spec, count, "storage", ctx)

    # engine: m multipliers + multi-operand adder + bias, one classifier/cycle
    x_nets = [x[i * u:(i + 1) * u] for i in range(m)]
    w_nets = [row[i * wb:(i + 1) * wb] for i in range(m)]
    bias_nets = row[m * wb:m * wb + bb]
    acc = _weighted_sum(ctx, x_nets, w_nets, bias_nets, acc_w, "engine", "engine_mul")

    # voter: strict greater-than updates; score resets to most negative
    score = [nl.reg(f"voter_score_b{k}", "voter", reset_value=1 if k == acc_w - 1 else 0)
             for k in range(acc_w)]
    winner = [nl.reg(f"voter_id_b{k}", "voter") for k in range(ctr_w)]
    cmp = _comparator_gt_signed(ctx, acc, score, "voter")
    upd = ctx.g("AND2", (cmp, not_done), "voter")
    for k in range(acc_w):
        nl.connect_reg(score[k], ctx.mux(upd, score[k], acc[k], "voter"))
    for k in range(ctr_w):
        nl.connect_reg(winner[k], ctx.mux(upd, winner[k], count[k], "voter"))

    nl.set_output_bus("class_id", winner)
    nl.set_output_bus("done", [done])
    nl.buses = {"control_count": count, "storage_row": row, "engine_acc": acc,
                "voter_score": score, "voter_id": winner, "done": [done]}
    nl.meta = _design_meta(q, "sequential", design_name,
                           counter_width=ctr_w, storage_rows=n,
                           multiplier_count=m, voter_comparators=1,
                           blocks=["control", "storage", "engine", "voter"])
    return nl.validate()


def build_parallel_baseline(q: QuantizedSvm, strategy="ovr") -> Netlist:
    """Fully combinational baseline for resource-ratio comparisons.

    "ovr": n functional weighted-sum blocks + argmax tree. "ovo_shape":
    n(n-1)/2 pairwise-classifier placeholders of identical width (row
    k mod n hardwired), counted for resources only.
    """
    if strategy not in ("ovr", "ovo_shape"):
        raise ValidationError(f"unknown baseline strategy {strategy!r}")
    if q.n < 2:
        raise ValidationError("circuit generation needs at least 2 classes")
    n, m = q.n, q.m
    u = q.input_format.total_bits
    wb = q.weight_format.total_bits
    bb = q.bias_format.total_bits
    acc_w = q.accumulator_width
    blocks_n = classifier_count("ovr" if strategy == "ovr" else "ovo", n)
    design_name = f"par_{strategy}_{q.name}" if q.name else f"par_{strategy}"

    nl = Netlist(design_name)
    ctx = _Ctx(nl)
    x = nl.add_input_bus("x", m * u)
    x_nets = [x[i * u:(i + 1) * u] for i in range(m)]

    scores = []
    for k in range(blocks_n):
        src = k % n
        block = f"cls{k}"
        w_nets = [_const_bits(nl, int(q.weights[src, i]) & ((1 << wb) - 1), wb)
                  for i in range(m)]
        bias_nets = _const_bits(nl, int(q.biases[src]) & ((1 << bb) - 1), bb)
        scores.append(_weighted_sum(ctx, x_nets, w_nets, bias_nets, acc_w, block,
                                    f"{block}_mul"))

    idx_w = max(1, ceil_log2(blocks_n)) if blocks_n > 1 else 1
    entries = [(scores[k], _const_bits(nl, k, idx_w)) for k in range(blocks_n)]
    comparators = 0
    while len(entries) > 1:
        nxt = []
        for i in range(0, len(entries) - 1, 2):
            (ls, li), (rs, ri) = entries[i], entries[i + 1]
            gt = _comparator_gt_signed(ctx, rs, ls, "argmax")  # strict: ties keep left
            comparators += 1
            ws = [ctx.mux(gt, ls[b], rs[b], "argmax") for b in range(acc_w)]
            wi = [ctx.mux(gt, li[b], ri[b], "argmax") for b in range(idx_w)]
            nxt.append((ws, wi))
        if len(entries) % 2:
            nxt.append(entries[-1])
        entries = nxt
    win_score, win_idx = entries[0]

    nl.set_output_bus("class_id", win_idx)
    nl.buses = {"argmax_score": win_score, "argmax_id": win_idx}
    nl.meta = _design_meta(q, f"parallel_{strategy}", design_name,
                           classifier_blocks=blocks_n,
                           multiplier_count=blocks_n * m,
                           argmax_comparators=comparators,
                           blocks=[f"cls{k}" for k in range(blocks_n)] + ["argmax"])
    return nl.validate()


def gate_census(nl: Netlist):
    return nl.census()
