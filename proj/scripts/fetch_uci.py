#!/usr/bin/env python3
"""Fetch the UCI datasets the benchmark harness and acceptance checks use.

Needs network access. Writes CSVs with a header row into data/ so they can be
passed straight to `slfs benchmark`. The bundled data/wdbc.csv (generated from
scikit-learn's copy of the Wisconsin diagnostic data) stands in for
breast_cancer.csv when this script has not been run.
"""

import argparse
import csv
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"


def fetch(url: str) -> bytes:
    print(f"  {url}")
    with urllib.request.urlopen(url, timeout=120) as r:
        return r.read()


def write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    print(f"  wrote {path} ({len(rows)} rows)")


def breast_cancer(out: Path) -> None:
    raw = fetch(f"{BASE}/breast-cancer-wisconsin/breast-cancer-wisconsin.data")
    header = [
        "clump_thickness", "cell_size_uniformity", "cell_shape_uniformity",
        "marginal_adhesion", "epithelial_cell_size", "bare_nuclei",
        "bland_chromatin", "normal_nucleoli", "mitoses", "class",
    ]
    rows = []
    for line in raw.decode().splitlines():
        parts = line.strip().split(",")
        if len(parts) != 11:
            continue
        # Drop the sample id; keep "?" so --missing-policy picks the handling.
        rows.append(parts[1:10] + ["malignant" if parts[10] == "4" else "benign"])
    write_csv(out / "breast_cancer.csv", header, rows)


def voting(out: Path) -> None:
    raw = fetch(f"{BASE}/voting-records/house-votes-84.data")
    header = [f"vote_{i}" for i in range(1, 17)] + ["party"]
    rows = []
    for line in raw.decode().splitlines():
        parts = line.strip().split(",")
        if len(parts) != 17:
            continue
        rows.append(parts[1:] + [parts[0]])
    write_csv(out / "voting.csv", header, rows)


def yeast(out: Path) -> None:
    raw = fetch(f"{BASE}/yeast/yeast.data")
    header = ["mcg", "gvh", "alm", "mit", "erl", "pox", "vac", "nuc", "class"]
    rows = []
    for line in raw.decode().splitlines():
        parts = line.split()
        if len(parts) != 10:
            continue
        rows.append(parts[1:])  # drop the sequence name
    write_csv(out / "yeast.csv", header, rows)


def isolet(out: Path) -> None:
    rows: list[list[str]] = []
    for name in ("isolet1+2+3+4.data.Z", "isolet5.data.Z"):
        blob = fetch(f"{BASE}/isolet/{name}")
        try:
            import unlzw3  # pip install unlzw3

            text = unlzw3.unlzw(blob).decode()
        except ImportError:
            sys.exit("isolet files are .Z compressed; pip install unlzw3 and rerun")
        for line in text.splitlines():
            parts = [p.strip() for p in line.split(",") if p.strip()]
            if len(parts) != 618:
                continue
            label = chr(ord("a") + int(float(parts[-1])) - 1)
            rows.append(parts[:-1] + [label])
    header = [f"a{i}" for i in range(1, 618)] + ["class"]
    write_csv(out / "isolet.csv", header, rows)


def isolet_zip_fallback(out: Path) -> None:
    # Some mirrors serve a plain zip instead of the .Z pair.
    blob = fetch(f"{BASE}/isolet/isolet.zip")
    rows: list[list[str]] = []
    with zipfile.ZipFile(io.BytesIO(blob)) as z:
        for name in z.namelist():
            if not name.endswith(".data"):
                continue
            for line in z.read(name).decode().splitlines():
                parts = [p.strip() for p in line.split(",") if p.strip()]
                if len(parts) != 618:
                    continue
                label = chr(ord("a") + int(float(parts[-1])) - 1)
                rows.append(parts[:-1] + [label])
    header = [f"a{i}" for i in range(1, 618)] + ["class"]
    write_csv(out / "isolet.csv", header, rows)


FETCHERS = {
    "breast_cancer": breast_cancer,
    "voting": voting,
    "yeast": yeast,
    "isolet": isolet,
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("datasets", nargs="*", default=[], help=f"subset of {sorted(FETCHERS)}")
    args = ap.parse_args()

    targets = args.datasets or sorted(FETCHERS)
    out = Path(args.out)
    failures = []
    for name in targets:
        if name not in FETCHERS:
            sys.exit(f"unknown dataset {name!r}; choose from {sorted(FETCHERS)}")
        print(f"fetching {name}")
        try:
            FETCHERS[name](out)
        except Exception as e:  # noqa: BLE001 - report and continue
            if name == "isolet":
                try:
                    isolet_zip_fallback(out)
                    continue
                except Exception as e2:  # noqa: BLE001
                    e = e2
            print(f"  failed: {e}", file=sys.stderr)
            failures.append(name)
    if failures:
        sys.exit(f"could not fetch: {', '.join(failures)}")


if __name__ == "__main__":
    main()
