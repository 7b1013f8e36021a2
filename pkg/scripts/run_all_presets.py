#!/usr/bin/env python3
"""Run every preset config and report exit codes.

Usage: python scripts/run_all_presets.py [--out-root DIR]
Artifacts land under each preset's output_dir unless --out-root is given,
in which case they are grouped under DIR/<preset-name>/.
"""

import argparse
import sys
import time
from pathlib import Path

from polarsolve.config import load_config
from polarsolve.runner import run_config

PRESET_DIR = Path(__file__).resolve().parent.parent / "presets"


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out-root", default=None)
    args = parser.parse_args()
    worst = 0
    for preset in sorted(PRESET_DIR.glob("*.cfg")):
        config = load_config(preset)
        out_dir = None
        if args.out_root:
            out_dir = Path(args.out_root) / preset.stem
        start = time.perf_counter()
        result = run_config(config, out_dir=out_dir)
        elapsed = time.perf_counter() - start
        print(f"{preset.name:45s} exit={result.exit_code} {elapsed:7.1f}s -> {result.out_dir}")
        worst = max(worst, result.exit_code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
