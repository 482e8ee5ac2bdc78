#!/usr/bin/env python3
"""The full experiment tables from the command line.

The `imae` CLI retrains every relevant model and emits CSV tables with a
reference column of the published values. This script shows the exact
invocations and runs a miniature one if the MNIST IDX files are available.
"""

import os
import subprocess
import sys
from pathlib import Path

from imae.data import CANONICAL_FILES

data_dir = Path(os.environ.get("IMAE_DATA_DIR", "data"))

print("Desk-scale reproduction commands (tens of CPU-minutes each):")
print()
print("  imae reproduce --table table1 --scale desk --seed 1 --out runs/table1")
print("  imae reproduce --table table2 --scale desk --seed 1 --out runs/table2")
print("  imae reproduce --table table3 --scale desk --nh 10 --seed 1 --out runs/table3")
print()
print("Individual experiments use config files; see README.md. Paper scale")
print("(full training set, 2000 epochs) sits behind `--scale paper`.")
print()

missing = [name for name in CANONICAL_FILES.values() if not (data_dir / name).is_file()]
if missing:
    print(f"MNIST IDX files not found under {data_dir.resolve()}.")
    print("Place these files there (or set IMAE_DATA_DIR) to run the tables:")
    for name in CANONICAL_FILES.values():
        print(f"  {name}")
    sys.exit(0)

print(f"found MNIST under {data_dir}; running a miniature table2 ...")
cmd = [sys.executable, "-m", "imae.cli", "reproduce", "--table", "table2",
       "--data-dir", str(data_dir), "--seed", "1", "--out", "runs/demo_table2",
       "--set", "train.epochs=20", "--set", "train.train_limit=2000",
       "--set", "eval.iterations=5"]
print(" ".join(cmd))
subprocess.run(cmd, check=True)
print(Path("runs/demo_table2/table2.csv").read_text())
