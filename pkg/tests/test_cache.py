import numpy as np
import pytest

from planarbond import cache as table_cache
from planarbond import molecular as mol
from planarbond import twocenter as tc
from planarbond.atomic import table_orbital

FIT = table_orbital("pe", 0.2e-3)


@pytest.fixture(scope="module")
def table():
    return tc.tabulate("cs", 0.2e-3, 1.0, -0.8334956250451983, FIT, tc.log_grid(0.01, 30.0, 12))


def test_round_trip_is_exact(table, tmp_path):
    path = table_cache.store(table, tmp_path)
    back = table_cache.load(path)
    assert back.points == table.points
    assert (back.model, back.lam, back.m3, back.eta, back.b, back.c) == \
        (table.model, table.lam, table.m3, table.eta, table.b, table.c)


def test_file_layout(table, tmp_path):
    text = table_cache.store(table, tmp_path).read_text().splitlines()
    assert text[0].startswith("# model=cs, lambda=0.0002, m3=1.0, eta=")
    assert text[0].endswith(f"version={table_cache.CACHE_VERSION}")
    assert text[2] == "R,Delta,D,E,Wplus,Wminus"
    assert len(text) == 3 + len(table.points)


def test_tampered_header_is_rejected(table, tmp_path):
    path = table_cache.store(table, tmp_path)
    text = path.read_text().replace("m3=1.0", "m3=206.768283")
    path.write_text(text)
    with pytest.raises(table_cache.CacheMismatch):
        table_cache.load(path)


def test_truncated_file_is_rejected(table, tmp_path):
    path = table_cache.store(table, tmp_path)
    path.write_text("\n".join(path.read_text().splitlines()[:-2]) + "\n")
    with pytest.raises(table_cache.CacheMismatch):
        table_cache.load(path)


def test_store_is_atomic_and_idempotent(table, tmp_path):
    a = table_cache.store(table, tmp_path)
    first = a.read_bytes()
    b = table_cache.store(table, tmp_path)
    assert a == b and b.read_bytes() == first
    assert [p.name for p in tmp_path.iterdir()] == [a.name]


def test_directory_precedence(monkeypatch, tmp_path):
    monkeypatch.setenv(table_cache.ENV_VAR, str(tmp_path / "env"))
    assert table_cache.default_dir() == tmp_path / "env"
    assert table_cache.default_dir(tmp_path / "flag") == tmp_path / "flag"
    monkeypatch.delenv(table_cache.ENV_VAR)
    assert table_cache.default_dir().name == "planarbond"


def test_cache_hit_skips_quadrature(tmp_path, monkeypatch):
    spec = mol.MoleculeSpec("ppe", 0.2e-3, "coulomb3d")
    eta, fit = mol.atomic_reference(spec)
    mol._INTEGRAL_MEMO.clear()
    first, key = mol.two_center_table(spec, eta, fit, tmp_path)
    tc.EVALUATIONS["count"] = 0
    mol._INTEGRAL_MEMO.clear()
    second, key2 = mol.two_center_table(spec, eta, fit, tmp_path)
    assert tc.EVALUATIONS["count"] == 0
    assert key == key2
    np.testing.assert_array_equal(first.column("w_plus"), second.column("w_plus"))
