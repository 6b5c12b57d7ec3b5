#!/usr/bin/env python3
"""Fetch and pre-clean the five UCI datasets into data/*.csv.

Needs internet access to archive.ics.uci.edu. Output format: feature
columns then the label column, comma-separated, no header -- exactly what
the bundled configs and the accuracy acceptance checks expect.

Cleaning rules (documented column-selection config):
  cardio       Cardiotocography: the 21 measurement columns, NSP as label
               (3 classes). The distribution ships CTG.xls, so this one
               needs `pip install xlrd` (or convert by hand, see --help).
  dermatology  34 features incl. age; '?' in the age column becomes 0.0;
               class column (1..6) is the label.
  pendigits    train+test concatenated; 16 features, label last.
  redwine      winequality-red.csv: ';' separators to ',', header dropped.
  whitewine    winequality-white.csv: same.
"""

import argparse
import csv
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

BASE = "https://archive.ics.uci.edu/static/public"
SOURCES = {
    "dermatology": f"{BASE}/33/dermatology.zip",
    "pendigits": f"{BASE}/81/pen+based+recognition+of+handwritten+digits.zip",
    "wine": f"{BASE}/186/wine+quality.zip",
    "cardio": f"{BASE}/193/cardiotocography.zip",
}


def _download(url):
    print(f"fetching {url}")
    with urllib.request.urlopen(url) as r:
        return r.read()


def _zip_member(blob, suffix):
    zf = zipfile.ZipFile(io.BytesIO(blob))
    for name in zf.namelist():
        if name.endswith(suffix):
            return zf.read(name)
    raise FileNotFoundError(f"no member ending with {suffix}")


def write_dermatology(outdir):
    raw = _zip_member(_download(SOURCES["dermatology"]), "dermatology.data")
    rows = []
    for line in raw.decode().splitlines():
        if not line.strip():
            continue
        cells = line.split(",")
        feats = ["0.0" if c == "?" else c for c in cells[:-1]]
        rows.append(feats + [cells[-1]])
    _write(outdir / "dermatology.csv", rows)


def write_pendigits(outdir):
    blob = _download(SOURCES["pendigits"])
    rows = []
    for member in ("pendigits.tra", "pendigits.tes"):
        for line in _zip_member(blob, member).decode().splitlines():
            if line.strip():
                rows.append([c.strip() for c in line.split(",")])
    _write(outdir / "pendigits.csv", rows)


def write_wines(outdir):
    blob = _download(SOURCES["wine"])
    for member, out in (("winequality-red.csv", "redwine.csv"),
                        ("winequality-white.csv", "whitewine.csv")):
        lines = _zip_member(blob, member).decode().splitlines()
        rows = [line.split(";") for line in lines[1:] if line.strip()]
        _write(outdir / out, rows)


def write_cardio(outdir):
    try:
        import xlrd  # noqa: F401  (CTG ships as .xls)
    except ImportError:
        print("cardio needs `pip install xlrd` to read CTG.xls; skipping.",
              file=sys.stderr)
        return
    import xlrd

    blob = _zip_member(_download(SOURCES["cardio"]), "CTG.xls")
    book = xlrd.open_workbook(file_contents=blob)
    sheet = book.sheet_by_name("Data")
    header = [str(c.value).strip() for c in sheet.row(1)]
    feat_cols = [header.index(c) for c in
                 ("LB", "AC", "FM", "UC", "DL", "DS", "DP", "ASTV", "MSTV",
                  "ALTV", "MLTV", "Width", "Min", "Max", "Nmax", "Nzeros",
                  "Mode", "Mean", "Median", "Variance", "Tendency")]
    nsp_col = header.index("NSP")
    rows = []
    for i in range(2, sheet.nrows):
        row = sheet.row(i)
        if row[nsp_col].ctype != xlrd.XL_CELL_NUMBER:
            continue
        feats = [repr(float(row[c].value)) for c in feat_cols]
        rows.append(feats + [str(int(row[nsp_col].value))])
    _write(outdir / "cardio.csv", rows)


def _write(path, rows):
    with open(path, "w", newline="") as f:
        csv.writer(f).writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--outdir", default="data")
    ap.add_argument("--only", nargs="*", help="subset of: dermatology pendigits wines cardio")
    args = ap.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    steps = {"dermatology": write_dermatology, "pendigits": write_pendigits,
             "wines": write_wines, "cardio": write_cardio}
    for name, fn in steps.items():
        if args.only and name not in args.only:
            continue
        try:
            fn(outdir)
        except Exception as exc:
            print(f"{name}: FAILED ({exc})", file=sys.stderr)


if __name__ == "__main__":
    main()
