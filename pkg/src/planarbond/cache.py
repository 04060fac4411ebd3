"""On-disk cache of two-center tables.

One CSV per table. Two comment lines carry the parameters, then the header
``R,Delta,D,E,Wplus,Wminus`` and one row per separation. The file name is a
SHA-256 prefix of the parameter lines, so a load can detect a stale or
tampered header by re-hashing it.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path

from .constants import PotentialModel
from .twocenter import TwoCenterPoint, TwoCenterTable

CACHE_VERSION = "2"
ENV_VAR = "PLANARBOND_CACHE"
COLUMNS = ("R", "Delta", "D", "E", "Wplus", "Wminus")


class CacheMismatch(ValueError):
    """Header parameters do not hash to the file name."""


def default_dir(flag: str | os.PathLike | None = None) -> Path:
    """Flag beats ``$PLANARBOND_CACHE`` beats ``~/.cache/planarbond``."""
    if flag:
        return Path(flag)
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "planarbond"


def _fmt(x: float) -> str:
    return repr(float(x))


def header_lines(table: TwoCenterTable) -> list[str]:
    return meta_lines(table.model, table.lam, table.m3, table.eta, table.b, table.c,
                      table.dimension, table.R, table.target_rel_err)


def meta_lines(model, lam, m3, eta, b, c, dimension, R_grid, target) -> list[str]:
    """Parameter comment lines; also the hash input for the file name."""
    model = PotentialModel.parse(model)
    return [
        f"# model={model.value}, lambda={_fmt(lam)}, m3={_fmt(m3)}, "
        f"eta={_fmt(eta)}, b={_fmt(b)}, c={_fmt(c)}, version={CACHE_VERSION}",
        f"# dimension={dimension}, R_min={_fmt(R_grid[0])}, R_max={_fmt(R_grid[-1])}, "
        f"n={len(R_grid)}, target={_fmt(target)}",
    ]


def key_for(lines) -> str:
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()[:24]


def path_for(table: TwoCenterTable, directory) -> Path:
    return Path(directory) / f"{key_for(header_lines(table))}.csv"


def render(table: TwoCenterTable) -> str:
    rows = header_lines(table) + [",".join(COLUMNS)]
    for p in table.points:
        rows.append(",".join(_fmt(v) for v in (p.R, p.Delta, p.D, p.E, p.w_plus, p.w_minus)))
    return "\n".join(rows) + "\n"


def store(table: TwoCenterTable, directory) -> Path:
    """Write ``table`` atomically (temp file in the same directory, then rename)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    target = path_for(table, directory)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(render(table))
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def _parse_meta(line: str) -> dict:
    body = line.lstrip("#").strip()
    out = {}
    for item in body.split(","):
        key, _, value = item.strip().partition("=")
        out[key.strip()] = value.strip()
    return out


def load(path) -> TwoCenterTable:
    path = Path(path)
    text = path.read_text().splitlines()
    comments = [ln for ln in text if ln.startswith("#")]
    if len(comments) != 2:
        raise CacheMismatch(f"{path.name}: expected two parameter lines")
    if key_for(comments) != path.stem:
        raise CacheMismatch(f"{path.name}: header does not match file name (stale cache?)")
    meta = {**_parse_meta(comments[0]), **_parse_meta(comments[1])}
    body = [ln for ln in text if ln and not ln.startswith("#")]
    if tuple(body[0].split(",")) != COLUMNS:
        raise CacheMismatch(f"{path.name}: unexpected column header")
    points = []
    for ln in body[1:]:
        vals = [float(v) for v in ln.split(",")]
        points.append(TwoCenterPoint(*vals))
    if len(points) != int(meta["n"]):
        raise CacheMismatch(f"{path.name}: row count differs from header")
    return TwoCenterTable(PotentialModel.parse(meta["model"]), float(meta["lambda"]),
                          float(meta["m3"]), float(meta["eta"]), float(meta["b"]),
                          float(meta["c"]), meta["dimension"], points,
                          float(meta["target"]), 0.0)


def lookup(lines, directory) -> TwoCenterTable | None:
    """Load the table whose parameter lines are ``lines``, if cached."""
    path = Path(directory) / f"{key_for(lines)}.csv"
    return load(path) if path.exists() else None
