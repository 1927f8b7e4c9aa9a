#!/usr/bin/env python3
"""Run the four shipped experiment configs through the CLI.

Produces the plot-ready CSVs and JSON summaries in ./results/<name>/ and
prints one line per experiment.  Use --threads to parallelize the Monte
Carlo paths (results are identical either way).
"""

import argparse
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
EXPERIMENTS = [
    ("ml-eval", "ml_eval_example.json"),
    ("hp", "hp_acceptance.json"),
    ("tfhp", "tfhp_acceptance.json"),
    ("gfhp", "gfhp_gamma_acceptance.json"),
    ("lemma-check", "lemma_check_acceptance.json"),
]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out-root", default=str(ROOT / "results"))
    args = parser.parse_args()

    failed = 0
    for subcommand, config in EXPERIMENTS:
        out_dir = Path(args.out_root) / config.removesuffix(".json")
        cmd = [
            sys.executable,
            "-m",
            "thp.cli",
            subcommand,
            "--config",
            str(ROOT / "configs" / config),
            "--out-dir",
            str(out_dir),
            "--threads",
            str(args.threads),
        ]
        rc = subprocess.run(cmd).returncode
        print(f"{subcommand:12s} {config:30s} exit={rc}")
        failed += rc != 0
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
