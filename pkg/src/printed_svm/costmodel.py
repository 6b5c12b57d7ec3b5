"""Area/power/frequency/latency/energy estimation under a parametric
printed-technology file, plus battery feasibility and design comparison."""

import json
import math
import warnings
from dataclasses import dataclass

from .errors import CostError, ValidationError
from .netlist import GATE_KINDS, Netlist

_ALL_KINDS = tuple(GATE_KINDS) + ("DFF",)


@dataclass(frozen=True)
class GateCost:
    area_cm2: float
    power_mw: float
    delay_ms: float

    def __post_init__(self):
        if min(self.area_cm2, self.power_mw, self.delay_ms) <= 0:
            raise ValidationError("technology entries must be strictly positive")


@dataclass
class TechFile:
    name: str
    gates: dict  # kind -> GateCost

    def __post_init__(self):
        missing = [k for k in _ALL_KINDS if k not in self.gates]
        if missing:
            raise ValidationError(f"technology file lacks entries for {missing}")

    def to_json(self):
        return {"name": self.name,
                "gates": {k: {"area_cm2": g.area_cm2, "power_mw": g.power_mw,
                              "delay_ms": g.delay_ms} for k, g in self.gates.items()}}

    @staticmethod
    def from_json(obj):
        gates = {k: GateCost(v["area_cm2"], v["power_mw"], v["delay_ms"])
                 for k, v in obj["gates"].items()}
        return TechFile(obj.get("name", "unnamed"), gates)

    @staticmethod
    def load(path):
        try:
            with open(path) as f:
                return TechFile.from_json(json.load(f))
        except (OSError, ValueError, KeyError) as exc:
            raise CostError(f"cannot read technology file {path}: {exc}") from exc

    def scaled(self, area_scale=1.0, power_scale=1.0, delay_scale=1.0, name=None):
        gates = {k: GateCost(g.area_cm2 * area_scale, g.power_mw * power_scale,
                             g.delay_ms * delay_scale) for k, g in self.gates.items()}
        return TechFile(name or f"{self.name}-scaled", gates)


# Per-gate EGFET-inspired defaults, deliberately uncalibrated: absolute
# printed-PDK numbers are not public, so only identities/ratios/laws are
# meaningful under this file. The DFF delay lumps clk->Q with setup. The
# power proxy is activity-independent (printed Hz-range designs are
# static-power dominated).
DEFAULT_TECH = TechFile("egfet-inspired-defaults-uncalibrated", {
    "NOT": GateCost(0.0010, 0.0010, 0.10),
    "AND2": GateCost(0.0020, 0.0018, 0.20),
    "OR2": GateCost(0.0020, 0.0018, 0.20),
    "NAND2": GateCost(0.0016, 0.0015, 0.16),
    "NOR2": GateCost(0.0016, 0.0015, 0.16),
    "XOR2": GateCost(0.0030, 0.0028, 0.28),
    "MUX2": GateCost(0.0034, 0.0030, 0.26),
    "DFF": GateCost(0.0080, 0.0060, 0.55),
})


@dataclass
class CostReport:
    area_cm2: float
    power_mw: float
    f_max_hz: float
    f_hz: float
    cycles: int
    latency_ms: float
    energy_mj: float
    battery_ok: bool

    def to_json(self):
        return {"area_cm2": self.area_cm2, "power_mw": self.power_mw,
                "f_max_hz": self.f_max_hz, "f_hz": self.f_hz, "cycles": self.cycles,
                "latency_ms": self.latency_ms, "energy_mj": self.energy_mj,
                "battery_ok": self.battery_ok}

    @staticmethod
    def from_json(obj):
        return CostReport(obj["area_cm2"], obj["power_mw"], obj["f_max_hz"],
                          obj["f_hz"], obj["cycles"], obj["latency_ms"],
                          obj["energy_mj"], obj["battery_ok"])


def critical_path_ms(nl: Netlist, tech: TechFile) -> float:
    """Longest register-to-register/boundary combinational path by gate delay.

    DFF outputs start at the DFF delay (clk->Q plus setup, lumped); path
    endpoints are DFF inputs and output ports.
    """
    arrival = [0.0] * nl.net_count()
    for ff in nl.dffs:
        arrival[ff.q] = tech.gates["DFF"].delay_ms
    for gi in nl.topo_order():
        g = nl.gates[gi]
        arrival[g.out] = tech.gates[g.kind].delay_ms + max(arrival[i] for i in g.inputs)
    ends = [ff.d for ff in nl.dffs] + [net for nets in nl.outputs.values() for net in nets]
    if not ends:
        raise ValidationError("design has no timing endpoints")
    return max(arrival[e] for e in ends)


def estimate(nl: Netlist, cycles: int, tech: TechFile = DEFAULT_TECH,
             target_f_hz=None, battery_budget_mw: float = 30.0) -> CostReport:
    """Sum per-gate area/power, derive f_max from the critical path, then
    latency = cycles / f and energy = power * latency (exact identity)."""
    if cycles < 1:
        raise ValidationError("cycles must be >= 1")
    census = nl.census()
    if census.total == 0:
        raise ValidationError("cannot cost an empty netlist")
    area = 0.0
    power = 0.0
    for kind, count in census.counts.items():
        area += count * tech.gates[kind].area_cm2
        power += count * tech.gates[kind].power_mw
    f_max = 1000.0 / critical_path_ms(nl, tech)
    if target_f_hz is not None:
        if target_f_hz > f_max:
            warnings.warn(f"target {target_f_hz} Hz exceeds f_max {f_max:.3f} Hz; clamped")
        f = min(target_f_hz, f_max)
    else:
        f = f_max
    latency = cycles / f * 1000.0
    energy = power * latency / 1000.0
    return CostReport(area, power, f_max, f, cycles, latency, energy,
                      power <= battery_budget_mw)


def battery_check(report: CostReport, budget_mw: float = 30.0) -> bool:
    """Feasible on a printed battery iff power does not exceed the budget."""
    return report.power_mw <= budget_mw


def compare_designs(a: CostReport, b: CostReport) -> dict:
    """Element-wise ratios b/a for area, power, and energy."""
    for label, value in (("area", a.area_cm2), ("power", a.power_mw),
                         ("energy", a.energy_mj)):
        if value == 0:
            raise ValidationError(f"cannot form ratio: {label} of baseline is zero")
    return {"area": b.area_cm2 / a.area_cm2, "power": b.power_mw / a.power_mw,
            "energy": b.energy_mj / a.energy_mj}


def geomean_ratios(tables) -> dict:
    """Geometric mean per metric across per-dataset ratio tables."""
    tables = list(tables)
    if not tables:
        raise ValidationError("no ratio tables to aggregate")
    keys = tables[0].keys()
    out = {}
    for k in keys:
        vals = [t[k] for t in tables]
        if any(v <= 0 for v in vals):
            raise ValidationError("geometric mean needs positive ratios")
        out[k] = math.exp(sum(math.log(v) for v in vals) / len(vals))
    return out


def mean_energy_improvement(reference_mj: dict, candidate_mj: dict) -> float:
    """Ratio of mean energies over the datasets both report.

    This is the aggregation behind headline cross-technique comparisons
    (mean reference energy / mean candidate energy on common datasets).
    """
    common = sorted(set(reference_mj) & set(candidate_mj))
    if not common:
        raise ValidationError("no common datasets to compare")
    ref = sum(reference_mj[d] for d in common) / len(common)
    ours = sum(candidate_mj[d] for d in common) / len(common)
    if ours <= 0:
        raise ValidationError("candidate energy must be positive")
    return ref / ours


def calibrate_tech(tech: TechFile, nl: Netlist, cycles: int, area_cm2: float,
                   power_mw: float, f_hz: float, name=None) -> TechFile:
    """Scale (area, power, delay) multipliers so `nl` matches the targets.

    Optional tooling: with one anchor design the least-squares fit is exact
    per knob. Never used by acceptance checks.
    """
    base = estimate(nl, cycles, tech)
    return tech.scaled(area_scale=area_cm2 / base.area_cm2,
                       power_scale=power_mw / base.power_mw,
                       delay_scale=base.f_max_hz / f_hz,
                       name=name or f"{tech.name}-calibrated")
