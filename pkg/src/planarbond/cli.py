"""``planarbond`` command line: atom, two-center and molecule runs plus regression checks.

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import logging
import math
import sys
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

import numpy as np

from . import cache as table_cache
from . import eigensolver as es
from . import molecular as mol
from . import twocenter as tc
from .atomic import CONVENTIONS, DEFAULT_CONVENTION, AtomSpec, FitDegenerate, solve_atom
from .constants import ATOMS, LAMBDA_ENDPOINTS, MOLECULES, PotentialModel

log = logging.getLogger("planarbond")

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
REPORT_COLUMNS = ("cell", "expected", "computed", "rel_dev", "tol", "pass")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    molecule: str = "ppe"
    atom: str = "pe"
    model: str = "cs"
    lam: float = 0.2e-3
    parity: str = "plus"
    mode: str = "paper"
    convention: str = DEFAULT_CONVENTION
    w_argument: str = "scaled"
    eta_source: str = "native"
    calibrate: bool = True
    points: int = mol.DEFAULT_POINTS
    quad_target: float = tc.DEFAULT_TARGET
    cache_dir: str = ""
    out_dir: str = "."

    def validate(self):
        if self.molecule not in MOLECULES:
            raise ConfigError(f"unknown molecule {self.molecule!r}; choose from {', '.join(MOLECULES)}")
        if self.atom not in ATOMS:
            raise ConfigError(f"unknown atom {self.atom!r}; choose from {', '.join(ATOMS)}")
        try:
            PotentialModel.parse(self.model)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        checks = [
            (self.lam > 0, "lambda must be positive"),
            (self.parity in mol.PARITIES, f"parity must be one of {mol.PARITIES}"),
            (self.mode in mol.MODES, f"mode must be one of {mol.MODES}"),
            (self.convention in CONVENTIONS, f"convention must be one of {CONVENTIONS}"),
            (self.w_argument in mol.W_ARGUMENTS, f"w_argument must be one of {mol.W_ARGUMENTS}"),
            (self.eta_source in mol.ETA_SOURCES, f"eta_source must be one of {mol.ETA_SOURCES}"),
            (self.points >= es.MIN_POINTS, f"points must be at least {es.MIN_POINTS}"),
            (0 < self.quad_target <= 1e-7, "quad_target must lie in (0, 1e-7]"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        return self

    def molecule_spec(self, **over) -> mol.MoleculeSpec:
        kw = dict(label=self.molecule, lam=self.lam, model=self.model, parity=self.parity,
                  mode=self.mode, convention=self.convention, w_argument=self.w_argument,
                  eta_source=self.eta_source, n_points=self.points)
        kw.update(over)
        return mol.MoleculeSpec(**kw)

    def cache_path(self) -> Path:
        return table_cache.default_dir(self.cache_dir or None)


_FIELDS = {f.name: f for f in fields(RunConfig)}
_ALIASES = {"lambda": "lam"}


def _coerce(name: str, raw):
    kind = _FIELDS[name].type
    if kind == "bool":
        if isinstance(raw, bool):
            return raw
        low = str(raw).strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"malformed boolean for {name}: {raw!r}")
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
    except ValueError:
        raise ConfigError(f"malformed value for {name}: {raw!r}") from None
    return str(raw).strip()


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment; unknown keys are errors."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key = _ALIASES.get(key.strip(), key.strip())
        if key not in _FIELDS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value.strip())
    return out


def parse_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then explicit flags."""
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for name in _FIELDS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = _coerce(name, flag)
    return RunConfig(**values).validate()


# ---------------------------------------------------------------- CSV helpers

def _num(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return "" if x is None else str(x)


def write_csv(path, header, rows) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v) for v in row])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())
    return path


def _lam_tag(lam) -> str:
    return f"{lam:.0e}".replace("e-0", "e-")


# ---------------------------------------------------------------- reference data

@dataclass(frozen=True)
class ReferenceCell:
    table: str
    row: str
    column: str
    value: float
    tol: float | None
    gating: bool
    provenance: str

    @property
    def name(self) -> str:
        return f"{self.table}:{self.row}:{self.column}"


def reference_cells(table: str | None = None) -> list[ReferenceCell]:
    text = resources.files("planarbond").joinpath("data/reference.csv").read_text()
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    cells = []
    for rec in csv.DictReader(lines):
        tol = float(rec["tol"]) if rec["tol"] else None
        cell = ReferenceCell(rec["table"], rec["row"], rec["column"], float(rec["value"]),
                             tol, rec["gating"] == "gate", rec["provenance"])
        if table is None or cell.table == table:
            cells.append(cell)
    return cells


@dataclass
class CheckRow:
    cell: str
    expected: float
    computed: float
    tol: float | None
    gating: bool

    @property
    def rel_dev(self) -> float:
        if not math.isfinite(self.computed):
            return math.inf
        return abs(self.computed / self.expected - 1.0)

    @property
    def passed(self) -> bool | None:
        if not self.gating:
            return None
        return self.rel_dev <= self.tol


@dataclass
class CheckReport:
    rows: list

    @property
    def passed(self) -> bool:
        return all(r.passed is not False for r in self.rows)

    def add(self, ref: ReferenceCell, computed: float):
        self.rows.append(CheckRow(ref.name, ref.value, float(computed), ref.tol, ref.gating))


def emit_report(report: CheckReport, path) -> Path:
    rows = []
    for r in report.rows:
        flag = "diagnostic" if r.passed is None else ("pass" if r.passed else "FAIL")
        rows.append((r.cell, r.expected, r.computed, r.rel_dev,
                     "" if r.tol is None else r.tol, flag))
    return write_csv(path, REPORT_COLUMNS, rows)


# ---------------------------------------------------------------- commands

ATOM_COLUMNS = ("label", "model", "lambda", "convention", "eta", "a", "b", "A", "c", "residual")


def _atom_row(sol):
    s, f = sol.spec, sol.fit
    if f is None:
        return (s.label, s.model.value, s.lam, s.convention, sol.eta, "", "", "", "", "")
    return (s.label, s.model.value, s.lam, s.convention, sol.eta, f.a, f.b, f.A, f.c, f.residual)


def cmd_atom(cfg: RunConfig, action: str) -> int:
    spec = AtomSpec(cfg.atom, cfg.lam, cfg.model, cfg.convention)
    sol = solve_atom(spec, fit=(action == "fit"))
    out = Path(cfg.out_dir) / f"atom_{cfg.atom}_{spec.model.value}_{_lam_tag(cfg.lam)}.csv"
    write_csv(out, ATOM_COLUMNS, [_atom_row(sol)])
    print(f"{cfg.atom}: eta = {sol.eta:.6f}" +
          (f", b = {sol.fit.b:.5f}" if sol.fit else "") + f"  -> {out}")
    return EXIT_OK


def cmd_tabulate(cfg: RunConfig) -> int:
    spec = cfg.molecule_spec()
    eta, fit = mol.atomic_reference(spec)
    table, key = mol.two_center_table(spec, eta, fit, cfg.cache_path())
    out = Path(cfg.out_dir) / f"twocenter_{key}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(table_cache.render(table))
    print(f"table {key}: {len(table.points)} points, eta = {eta:.6f}, b = {fit.b:.5f} -> {out}")
    return EXIT_OK


RESULT_COLUMNS = ("label", "model", "lambda", "parity", "convention", "w_argument",
                  "eta_source", "epsilon", "mean_rho", "mean_rho_paper_literal",
                  "rho_min", "rho_max", "points", "cache_key")


def _result_row(res: mol.MoleculeResult):
    s = res.spec
    lam = s.lam if s.model is PotentialModel.CS else math.nan
    return (s.label, s.model.value, lam, s.parity, s.convention, s.w_argument, s.eta_source,
            res.epsilon, res.mean_rho, res.mean_rho_paper_literal,
            res.grid.rho_min, res.grid.rho_max, res.grid.n, res.table_provenance)


def _locked(cfg: RunConfig) -> RunConfig:
    if not cfg.calibrate:
        return cfg
    best = calibration(cfg)[0]
    log.info("calibration locked: %s", best)
    return dataclasses.replace(cfg, convention=best.convention, w_argument=best.w_argument,
                               eta_source=best.eta_source)


_CALIBRATION: dict = {}


def calibration(cfg: RunConfig):
    key = (cfg.mode, str(cfg.cache_path()))
    if key not in _CALIBRATION:
        _CALIBRATION[key] = mol.calibrate(mode=cfg.mode, cache_dir=cfg.cache_path())
    return _CALIBRATION[key]


def cmd_molecule_solve(cfg: RunConfig) -> int:
    spec = cfg.molecule_spec()
    res = mol.solve_molecule(spec, cfg.cache_path())
    stem = f"molecule_{spec.label}_{spec.model.value}_{_lam_tag(spec.lam)}_{spec.parity}"
    out = Path(cfg.out_dir)
    write_csv(out / f"{stem}.csv", RESULT_COLUMNS, [_result_row(res)])
    rho = res.grid.points
    step = max(1, len(rho) // 2000)
    write_csv(out / f"{stem}_wave.csv", ("rho", "u"), zip(rho[::step], res.u[::step]))
    write_csv(out / f"{stem}_potential.csv", ("rho", "U"),
              zip(rho[::step], res.potential[::step]))
    print(f"{spec.label} {spec.model.value}: epsilon = {res.epsilon:.6g}, "
          f"<rho> = {res.mean_rho:.6g} -> {out / stem}.csv")
    return EXIT_OK


def cmd_molecule_compare(cfg: RunConfig) -> int:
    rows = mol.compare_models(cfg.molecule, LAMBDA_ENDPOINTS, cfg.molecule_spec(),
                              cfg.cache_path())
    out = Path(cfg.out_dir) / f"compare_{cfg.molecule}.csv"
    write_csv(out, RESULT_COLUMNS, [_result_row(r["result"]) for r in rows])
    for r in rows:
        print(f"{r['label']:5s} {r['model']:10s} lambda={r['lambda']:<8g} "
              f"epsilon={r['epsilon']:.6g} <rho>={r['mean_rho']:.6g}")
    return EXIT_OK


def _model_column(column: str):
    if column.startswith("cs@"):
        return PotentialModel.CS, float(column[3:])
    return PotentialModel.parse(column), LAMBDA_ENDPOINTS[0]


def reproduce(cfg: RunConfig, target: str, model_filter: str = "all") -> CheckReport:
    report = CheckReport([])
    if target == "fig1":
        (ref,) = reference_cells("fig1")
        sol = solve_atom(AtomSpec("pe", 0.2e-5, PotentialModel.CS, cfg.convention), fit=False)
        report.add(ref, sol.eta)
        return report
    if target == "table1":
        fits = {}
        for ref in reference_cells("table1"):
            which, lam = ref.column.split("@")
            key = (ref.row, float(lam))
            if key not in fits:
                fits[key] = solve_atom(AtomSpec(ref.row, float(lam), PotentialModel.CS,
                                                cfg.convention)).fit
            report.add(ref, getattr(fits[key], which))
        return report
    locked = _locked(cfg) if model_filter in ("cs", "all") else cfg
    results = {}
    for ref in reference_cells(target):
        model, lam = _model_column(ref.column)
        if model_filter != "all" and model.value != model_filter:
            continue
        key = (ref.row, model, lam)
        if key not in results:
            base = locked if model is PotentialModel.CS else cfg
            spec = base.molecule_spec(label=ref.row, model=model, lam=lam)
            try:
                results[key] = mol.solve_molecule(spec, cfg.cache_path())
            except es.EigenError as exc:
                log.warning("%s: %s", ref.name, exc)
                results[key] = None
        res = results[key]
        if res is None:
            value = math.nan
        else:
            value = res.epsilon if target == "table3" else res.mean_rho
        report.add(ref, value)
    return report


def cmd_reproduce(cfg: RunConfig, target: str, model_filter: str) -> int:
    report = reproduce(cfg, target, model_filter)
    suffix = "" if model_filter == "all" or target in ("table1", "fig1") else f"_{model_filter}"
    out = Path(cfg.out_dir) / f"check_{target}{suffix}.csv"
    emit_report(report, out)
    for r in report.rows:
        flag = "diagnostic" if r.passed is None else ("pass" if r.passed else "FAIL")
        print(f"{r.cell:28s} expected={r.expected:<11g} computed={r.computed:<13.6g} "
              f"rel_dev={r.rel_dev:<10.3g} {flag}")
    print(f"overall: {'pass' if report.passed else 'FAIL'} -> {out}")
    return EXIT_OK if report.passed else EXIT_CHECK


# ---------------------------------------------------------------- argparse

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--cache-dir", dest="cache_dir",
                   help=f"table cache directory (default ${table_cache.ENV_VAR} or ~/.cache/planarbond)")
    p.add_argument("--out-dir", dest="out_dir", help="directory for CSV outputs")
    p.add_argument("--model", choices=[m.value for m in PotentialModel])
    p.add_argument("--lambda", dest="lam", type=float, help="photon mass parameter")
    p.add_argument("--convention", choices=CONVENTIONS)
    p.add_argument("-v", "--verbose", action="store_true")


def _add_molecular(p: argparse.ArgumentParser):
    p.add_argument("--molecule", choices=list(MOLECULES))
    p.add_argument("--parity", choices=mol.PARITIES)
    p.add_argument("--mode", choices=mol.MODES)
    p.add_argument("--w-argument", dest="w_argument", choices=mol.W_ARGUMENTS)
    p.add_argument("--eta-source", dest="eta_source", choices=mol.ETA_SOURCES)
    p.add_argument("--points", type=int, help="radial grid points")
    p.add_argument("--quad-target", dest="quad_target", type=float)
    cal = p.add_mutually_exclusive_group()
    cal.add_argument("--calibrate", dest="calibrate", action="store_const", const=True,
                     help="lock CS conventions on the anchor cell first")
    cal.add_argument("--no-calibrate", dest="calibrate", action="store_const", const=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="planarbond", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    atom = sub.add_parser("atom", help="single-nucleus ground state")
    atom.add_argument("action", choices=("solve", "fit"))
    atom.add_argument("--atom", choices=list(ATOMS))
    _add_common(atom)

    two = sub.add_parser("twocenter", help="two-center integral tables")
    two.add_argument("action", choices=("tabulate",))
    _add_common(two)
    _add_molecular(two)

    m = sub.add_parser("molecule", help="molecular ground state")
    m.add_argument("action", choices=("solve", "compare"))
    _add_common(m)
    _add_molecular(m)

    rep = sub.add_parser("reproduce", help="check against the published tables")
    rep.add_argument("target", choices=("table1", "table3", "table4", "fig1"))
    rep.add_argument("--only", dest="model_filter", default="all",
                     choices=("all",) + tuple(m.value for m in PotentialModel),
                     help="restrict table3/table4 to one model")
    _add_common(rep)
    _add_molecular(rep)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_config(args)
    except (ConfigError, OSError) as exc:
        print(f"planarbond: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "atom":
            return cmd_atom(cfg, args.action)
        if args.command == "twocenter":
            return cmd_tabulate(cfg)
        if args.command == "molecule":
            if args.action == "solve":
                return cmd_molecule_solve(cfg)
            return cmd_molecule_compare(cfg)
        return cmd_reproduce(cfg, args.target, args.model_filter)
    except (es.EigenError, tc.QuadratureError, FitDegenerate, mol.TableCoverageError,
            FloatingPointError) as exc:
        print(f"planarbond: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except table_cache.CacheMismatch as exc:
        print(f"planarbond: cache error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
