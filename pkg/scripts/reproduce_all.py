"""Run every ``reproduce`` target and summarise pass/fail per cell."""

from __future__ import annotations

import argparse
import time

from planarbond.cli import run

TARGETS = ("fig1", "table1", "table3", "table4")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out")
    ap.add_argument("--cache-dir", default=None)
    ap.add_argument("--targets", nargs="+", choices=TARGETS, default=list(TARGETS))
    args = ap.parse_args(argv)

    common = ["--out-dir", args.out_dir]
    if args.cache_dir:
        common += ["--cache-dir", args.cache_dir]
    status = {}
    for target in args.targets:
        t0 = time.perf_counter()
        status[target] = run(["reproduce", target, *common])
        print(f"== {target}: exit {status[target]} ({time.perf_counter() - t0:.1f} s)\n")
    for target, code in status.items():
        print(f"{target:7s} {'pass' if code == 0 else f'exit {code}'}")
    return max(status.values())


if __name__ == "__main__":
    raise SystemExit(main())
