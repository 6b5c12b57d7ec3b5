#!/usr/bin/env python3
"""Write the five synthetic stand-in CSVs plus ready-to-run pipeline configs.

Usage: python scripts/make_demo_data.py [--outdir data] [--configdir configs]
"""

import argparse
import json
from pathlib import Path

from printed_svm.refdata import DATASETS
from printed_svm.synthetic import make_standin, standin_name, write_csv


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--outdir", default="data")
    ap.add_argument("--configdir", default="configs")
    ap.add_argument("--seed", type=int, default=1234)
    args = ap.parse_args()

    outdir = Path(args.outdir)
    cfgdir = Path(args.configdir)
    outdir.mkdir(parents=True, exist_ok=True)
    cfgdir.mkdir(parents=True, exist_ok=True)

    for dataset in DATASETS:
        name = standin_name(dataset)
        csv_path = outdir / f"{name}.csv"
        write_csv(make_standin(dataset, seed=args.seed), csv_path)
        cfg = {
            "name": name,
            "dataset": {"path": str(csv_path), "label_column": -1, "header": False},
            "seed": 42,
            "split": {"train_fraction": 0.8},
            "train": {"lam": 1e-3, "epochs": 200, "batch_size": 64},
            "quant": {"max_accuracy_drop": 0.01, "weight_fraction_min": 2,
                      "weight_fraction_max": 12, "input_fraction_bits": 4},
            "tech": None,
            "target_f_hz": None,
            "outdir": f"runs/{name}",
        }
        cfg_path = cfgdir / f"{name}.json"
        cfg_path.write_text(json.dumps(cfg, indent=2) + "\n")
        print(f"wrote {csv_path} and {cfg_path}")


if __name__ == "__main__":
    main()
