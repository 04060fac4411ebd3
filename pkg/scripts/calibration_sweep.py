"""Score every convention combination on the ppe anchor cell and write a CSV."""

from __future__ import annotations

import argparse
from pathlib import Path

from planarbond import molecular as mol
from planarbond.cache import default_dir
from planarbond.cli import write_csv


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mode", choices=mol.MODES, default="paper")
    ap.add_argument("--cache-dir", default=None)
    ap.add_argument("--out", default="out/calibration.csv")
    args = ap.parse_args(argv)

    results = mol.calibrate(mode=args.mode, cache_dir=default_dir(args.cache_dir))
    label, lam, target = mol.ANCHOR
    print(f"anchor {label} lambda={lam:g} epsilon={target}")
    for r in results:
        print(f"{r.convention} {r.w_argument:6s} {r.eta_source:8s} "
              f"epsilon={r.epsilon:<12.6g} rel_dev={r.rel_dev:.4g}")
    rows = [(r.convention, r.w_argument, r.eta_source, r.epsilon, r.rel_dev) for r in results]
    path = write_csv(Path(args.out), ("convention", "w_argument", "eta_source", "epsilon",
                                      "rel_dev"), rows)
    print(f"-> {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
