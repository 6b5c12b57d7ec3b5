"""Pipeline CLI: load -> split -> train -> quantize -> generate -> simulate
-> cost, with per-stage subcommands, reproducible configs, and the
comparison table."""

import argparse
import json
import os
import sys
from pathlib import Path

from . import refdata
from .costmodel import DEFAULT_TECH, TechFile, estimate
from .circuitgen import build_sequential, gate_census
from .dataset import SplitSpec, apply_normalizer, fit_normalizer, load_csv, split
from .errors import (EXIT_CONFIG, EXIT_COST, EXIT_DATA, EXIT_EQUIVALENCE, EXIT_OK,
                     EXIT_OTHER, EXIT_TRAIN, ConfigError, EquivalenceError, ToolError)
from .quantizer import (FixedFormat, QuantPolicy, QuantizedSvm, quantize_model,
                        raw_inputs, snap_to_input_grid)
from .simulator import equivalence_check, simulate, write_trace_csv
from .trainer import SvmModel, TrainConfig, train_ovr
from .util import sha256_file, stable_json
from .verilog import emit_hdl, parse_hdl

_STAGE_EXIT = {"config": EXIT_CONFIG, "data": EXIT_DATA, "train": EXIT_TRAIN,
               "equivalence": EXIT_EQUIVALENCE, "cost": EXIT_COST}

ARTIFACTS = {
    "model": "model.json",
    "normalizer": "normalizer.json",
    "quantized": "quantized.json",
    "hdl": "design.v",
    "census": "census.json",
    "equivalence": "equivalence.json",
    "cost": "cost.json",
}


class StageFailure(Exception):
    def __init__(self, stage, cause):
        super().__init__(f"stage {stage}: {cause}")
        self.stage = stage
        self.cause = cause


def _stage(stage, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageFailure:
        raise
    except Exception as exc:
        raise StageFailure(stage, exc) from exc


def normalize_config(cfg: dict) -> dict:
    for key in ("name", "dataset", "outdir"):
        if key not in cfg:
            raise ConfigError(f"config lacks required key {key!r}")
    if "path" not in cfg["dataset"]:
        raise ConfigError("config dataset section lacks 'path'")
    cfg.setdefault("seed", 42)
    cfg.setdefault("split", {})
    cfg.setdefault("train", {})
    cfg.setdefault("quant", {})
    cfg.setdefault("tech", None)
    cfg.setdefault("target_f_hz", None)
    return cfg


def load_config(path, overrides=None) -> dict:
    try:
        with open(path) as f:
            cfg = json.load(f)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg = normalize_config(cfg)
    for key, value in (overrides or {}).items():
        if value is not None:
            cfg[key] = value
    return cfg


def _outdir(cfg) -> Path:
    out = Path(cfg["outdir"])
    root = os.environ.get("PRINTED_SVM_OUT")
    if root and not out.is_absolute():
        out = Path(root) / out
    out.mkdir(parents=True, exist_ok=True)
    return out


def _tech_for(cfg) -> TechFile:
    return TechFile.load(cfg["tech"]) if cfg["tech"] else DEFAULT_TECH


def _prepare_data(cfg):
    """Load, split, normalize on the train split, snap to the input grid."""
    ds_cfg = cfg["dataset"]
    data = load_csv(ds_cfg["path"], ds_cfg.get("label_column", -1),
                    ds_cfg.get("header", False), name=cfg["name"])
    spec = SplitSpec(cfg["split"].get("train_fraction", 0.8), cfg["seed"])
    train, test = split(data, spec)
    norm = fit_normalizer(train)
    policy = _policy_for(cfg)
    in_fmt = FixedFormat(False, 0, policy.input_fraction_bits)
    train = snap_to_input_grid(apply_normalizer(norm, train), in_fmt)
    test = snap_to_input_grid(apply_normalizer(norm, test), in_fmt)
    return train, test, norm


def _policy_for(cfg) -> QuantPolicy:
    qc = cfg["quant"]
    return QuantPolicy(qc.get("max_accuracy_drop", 0.01),
                       qc.get("weight_fraction_min", 2),
                       qc.get("weight_fraction_max", 12),
                       qc.get("input_fraction_bits", 4))


def _train_config(cfg) -> TrainConfig:
    tc = cfg["train"]
    return TrainConfig(tc.get("lam", 1e-3), tc.get("epochs", 200), cfg["seed"],
                       tc.get("schedule", "pegasos"), tc.get("batch_size", 64))


def _write(path: Path, text: str):
    path.write_text(text)


def run_pipeline(cfg) -> dict:
    """Full run; writes every artifact plus a manifest with their hashes.

    Raises StageFailure naming the failing stage; equivalence mismatches
    fail the equivalence stage after the report is written.
    """
    cfg = normalize_config(dict(cfg))
    out = _outdir(cfg)
    train, test, norm = _stage("data", _prepare_data, cfg)
    model = _stage("train", train_ovr, train, _train_config(cfg))
    q = _stage("train", quantize_model, model, test, _policy_for(cfg))
    nl = _stage("generate", build_sequential, q)
    hdl = emit_hdl(nl)

    _write(out / ARTIFACTS["model"], stable_json(model.to_json()))
    _write(out / ARTIFACTS["normalizer"], stable_json(norm.to_json()))
    _write(out / ARTIFACTS["quantized"], stable_json(q.to_json()))
    _write(out / ARTIFACTS["hdl"], hdl)
    _write(out / ARTIFACTS["census"], stable_json(gate_census(nl).to_json()))

    report = _stage("equivalence", equivalence_check, q, nl, test)
    _write(out / ARTIFACTS["equivalence"], stable_json(report.to_json()))
    if not report.passed:
        raise StageFailure("equivalence",
                           EquivalenceError(f"{report.class_mismatches} class / "
                                            f"{report.accumulator_mismatches} accumulator mismatches"))

    cost = _stage("cost", lambda: estimate(nl, q.n, _tech_for(cfg), cfg["target_f_hz"]))
    _write(out / ARTIFACTS["cost"], stable_json(cost.to_json()))

    manifest = {
        "name": cfg["name"],
        "config": cfg,
        "artifacts": {key: str(out / fname) for key, fname in ARTIFACTS.items()},
        "hashes": {key: sha256_file(out / fname) for key, fname in ARTIFACTS.items()},
        "results": {
            "m": q.m,
            "n": q.n,
            "cycles": report.cycles,
            "float_accuracy": q.float_accuracy,
            "quantized_accuracy": q.quantized_accuracy,
            "weight_format": str(q.weight_format),
            "input_format": str(q.input_format),
            "accumulator_width": q.accumulator_width,
            "gate_met": q.gate_met,
            "class_mismatches": report.class_mismatches,
            "accumulator_mismatches": report.accumulator_mismatches,
            "area_cm2": cost.area_cm2,
            "power_mw": cost.power_mw,
            "f_hz": cost.f_hz,
            "latency_ms": cost.latency_ms,
            "energy_mj": cost.energy_mj,
            "battery_ok": cost.battery_ok,
        },
    }
    _write(out / "manifest.json", stable_json(manifest))
    return manifest


# -- per-stage subcommands ----------------------------------------------------

def cmd_train(cfg):
    out = _outdir(cfg)
    train, _test, norm = _stage("data", _prepare_data, cfg)
    model = _stage("train", train_ovr, train, _train_config(cfg))
    _write(out / ARTIFACTS["model"], stable_json(model.to_json()))
    _write(out / ARTIFACTS["normalizer"], stable_json(norm.to_json()))
    print(f"wrote {out / ARTIFACTS['model']}")


def cmd_quantize(cfg):
    out = _outdir(cfg)
    with open(out / ARTIFACTS["model"]) as f:
        model = SvmModel.from_json(json.load(f))
    _train, test, _norm = _stage("data", _prepare_data, cfg)
    q = _stage("train", quantize_model, model, test, _policy_for(cfg))
    _write(out / ARTIFACTS["quantized"], stable_json(q.to_json()))
    print(f"wrote {out / ARTIFACTS['quantized']} "
          f"(accuracy {q.quantized_accuracy:.4f}, weights {q.weight_format})")


def cmd_generate(cfg):
    out = _outdir(cfg)
    with open(out / ARTIFACTS["quantized"]) as f:
        q = QuantizedSvm.from_json(json.load(f))
    nl = _stage("generate", build_sequential, q)
    _write(out / ARTIFACTS["hdl"], emit_hdl(nl))
    _write(out / ARTIFACTS["census"], stable_json(gate_census(nl).to_json()))
    print(f"wrote {out / ARTIFACTS['hdl']} ({gate_census(nl).total} cells)")


def cmd_simulate(cfg, trace_sample=None, trace_out=None):
    out = _outdir(cfg)
    with open(out / ARTIFACTS["quantized"]) as f:
        q = QuantizedSvm.from_json(json.load(f))
    nl = parse_hdl((out / ARTIFACTS["hdl"]).read_text())
    _train, test, _norm = _stage("data", _prepare_data, cfg)
    report = _stage("equivalence", equivalence_check, q, nl, test)
    _write(out / ARTIFACTS["equivalence"], stable_json(report.to_json()))
    if trace_sample is not None:
        x = raw_inputs(test, q.input_format)[trace_sample]
        _cls, trace = simulate(nl, x)
        write_trace_csv(trace, trace_out or out / f"trace_{trace_sample}.csv")
    print(f"equivalence: {report.samples} samples, "
          f"{report.class_mismatches} class mismatches, "
          f"agreement {report.accumulator_agreement:.6f}")
    if not report.passed:
        raise StageFailure("equivalence", EquivalenceError("differential mismatches"))


def cmd_cost(cfg):
    out = _outdir(cfg)
    nl = parse_hdl((out / ARTIFACTS["hdl"]).read_text())
    cost = _stage("cost", lambda: estimate(nl, nl.meta["n"], _tech_for(cfg),
                                           cfg["target_f_hz"]))
    _write(out / ARTIFACTS["cost"], stable_json(cost.to_json()))
    print(f"area {cost.area_cm2:.2f} cm2, power {cost.power_mw:.2f} mW, "
          f"f_max {cost.f_max_hz:.2f} Hz, latency {cost.latency_ms:.1f} ms, "
          f"energy {cost.energy_mj:.3f} mJ, battery_ok {cost.battery_ok}")


TABLE_COLUMNS = ("Dataset", "Model", "Acc. (%)", "Area (cm2)", "Power (mW)",
                 "Freq. (Hz)", "Latency (ms)", "Energy (mJ)")


def report_table(manifests, include_reference=False):
    """Rows in the published column order; one row per run manifest."""
    if not manifests:
        raise ConfigError("no manifests given")
    rows = []
    for man in manifests:
        r = man["results"]
        rows.append((man["name"], "sequential-svm (generated)",
                     round(100.0 * r["quantized_accuracy"], 2), round(r["area_cm2"], 3),
                     round(r["power_mw"], 3), round(r["f_hz"], 2),
                     round(r["latency_ms"], 2), round(r["energy_mj"], 4)))
    if include_reference:
        for ref in refdata.REFERENCE_ROWS:
            rows.append((ref.dataset, ref.model + " (reference)", ref.accuracy_pct,
                         ref.area_cm2, ref.power_mw, ref.freq_hz, ref.latency_ms,
                         ref.energy_mj))
    return rows


def _format_table(rows, fmt):
    lines = []
    if fmt == "csv":
        lines.append(",".join(TABLE_COLUMNS))
        for row in rows:
            lines.append(",".join(str(v) for v in row))
    else:
        widths = [max(len(str(v)) for v in [col] + [r[i] for r in rows])
                  for i, col in enumerate(TABLE_COLUMNS)]
        lines.append("  ".join(str(c).ljust(w) for c, w in zip(TABLE_COLUMNS, widths)))
        for row in rows:
            lines.append("  ".join(str(v).ljust(w) for v, w in zip(row, widths)))
    return "\n".join(lines)


def cmd_table(manifest_paths, include_reference, fmt, out_path=None):
    manifests = []
    for path in manifest_paths:
        try:
            with open(path) as f:
                manifests.append(json.load(f))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    text = _format_table(report_table(manifests, include_reference), fmt)
    if out_path:
        _write(Path(out_path), text + "\n")
    else:
        print(text)


def build_parser():
    parser = argparse.ArgumentParser(prog="printed-svm",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_cfg(p):
        p.add_argument("--config", required=True, help="pipeline config JSON")
        p.add_argument("--outdir", help="override config outdir")
        p.add_argument("--seed", type=int, help="override config seed")
        p.add_argument("--tech", help="override technology file path")
        p.add_argument("--target-f-hz", type=float, dest="target_f_hz",
                       help="pin the clock instead of using f_max")

    for name in ("train", "quantize", "generate", "cost", "pipeline"):
        add_cfg(sub.add_parser(name))
    p_sim = sub.add_parser("simulate")
    add_cfg(p_sim)
    p_sim.add_argument("--trace-sample", type=int, help="dump a per-cycle trace CSV")
    p_sim.add_argument("--trace-out", help="trace CSV path")

    p_table = sub.add_parser("table")
    p_table.add_argument("manifests", nargs="*", help="manifest.json paths")
    p_table.add_argument("--refs", action="store_true",
                         help="append bundled literature reference rows")
    p_table.add_argument("--format", choices=("text", "csv"), default="text")
    p_table.add_argument("--out", help="write table to a file instead of stdout")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "table":
            cmd_table(args.manifests, args.refs, args.format, args.out)
            return EXIT_OK
        overrides = {"outdir": args.outdir, "seed": args.seed, "tech": args.tech,
                     "target_f_hz": args.target_f_hz}
        cfg = load_config(args.config, overrides)
        if args.command == "train":
            cmd_train(cfg)
        elif args.command == "quantize":
            cmd_quantize(cfg)
        elif args.command == "generate":
            cmd_generate(cfg)
        elif args.command == "simulate":
            cmd_simulate(cfg, args.trace_sample, args.trace_out)
        elif args.command == "cost":
            cmd_cost(cfg)
        elif args.command == "pipeline":
            manifest = run_pipeline(cfg)
            print(f"pipeline ok: {manifest['artifacts']['cost']}")
        return EXIT_OK
    except StageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _STAGE_EXIT.get(exc.stage, EXIT_OTHER)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ToolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
