"""Run every bundled config in configs/ through the CLI and write artifacts under out/.

Blow-ups (exit 3) are reported and their partial CSVs kept; only config errors fail the script.

    python3 scripts/reproduce_figures.py [--out out] [--only NAME ...]
"""
import argparse
import sys
import time
from pathlib import Path

from evslv.cli import EXIT_CONFIG, infer_command, main
from evslv.config import load_config

ROOT = Path(__file__).resolve().parents[1]


def run(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(ROOT / "out"))
    ap.add_argument("--only", nargs="*", help="config stems to run")
    args = ap.parse_args(argv)
    worst = 0
    for path in sorted((ROOT / "configs").glob("*.json")):
        if args.only and path.stem not in args.only:
            continue
        cfg = load_config(path)
        cmd = infer_command(cfg)
        t0 = time.perf_counter()
        out = str(Path(args.out) / path.stem)
        code = main([cmd, "--config", str(path), "--out", out])
        print(f"  [{cmd}] {path.stem}: exit {code} in {time.perf_counter() - t0:.1f}s")
        if cmd == "simulate":
            # scenario codes are informative, not failures
            scenario = main(["classify", "--config", str(path), "--out", out, "--quiet"])
            print(f"  [classify] {path.stem}: scenario code {scenario}")
        if code == EXIT_CONFIG:
            worst = code
    return worst


if __name__ == "__main__":
    sys.exit(run())
