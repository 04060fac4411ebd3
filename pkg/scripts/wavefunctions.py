"""Ground-state u(rho) of dde and ddmu at both lambda endpoints as plot-ready CSV.

Each curve is rescaled to unit peak so that all four fit one set of axes.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from planarbond import molecular as mol
from planarbond.cache import default_dir
from planarbond.cli import write_csv
from planarbond.constants import LAMBDA_ENDPOINTS


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--molecules", nargs="+", default=["dde", "ddmu"])
    ap.add_argument("--convention", default="D")
    ap.add_argument("--w-argument", dest="w_argument", default="scaled",
                    choices=mol.W_ARGUMENTS)
    ap.add_argument("--cache-dir", default=None)
    ap.add_argument("--out-dir", default="out")
    args = ap.parse_args(argv)

    cache = default_dir(args.cache_dir)
    for label in args.molecules:
        for lam in LAMBDA_ENDPOINTS:
            spec = mol.MoleculeSpec(label, lam, convention=args.convention,
                                    w_argument=args.w_argument)
            res = mol.solve_molecule(spec, cache)
            u = res.u / np.max(np.abs(res.u))
            step = max(1, u.size // 2000)
            path = write_csv(Path(args.out_dir) / f"wave_{label}_{lam:g}.csv", ("rho", "u"),
                             zip(res.grid.points[::step], u[::step]))
            peak = res.grid.points[int(np.argmax(np.abs(u)))]
            print(f"{label} lambda={lam:g}: epsilon={res.epsilon:.6g} <rho>={res.mean_rho:.6g} "
                  f"peak at rho={peak:.6g} -> {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
