import json
import subprocess
import sys

import pytest

from toric_periods.brandt import class_set
from toric_periods.cli import main
from toric_periods.cli.cache import SCHEMA, ClassSetCache
from toric_periods.cli.config import RunConfig, load_config
from toric_periods.errors import DomainError
from toric_periods.quaternion import algebra_from_ramification, maximal_order


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classset_command(capsys):
    code, out, _ = run(["classset", "--ramified", "11"], capsys)
    data = json.loads(out)
    assert code == 0 and data["n"] == 2 and data["mass"] == "5/12"


def test_brandt_command(capsys):
    code, out, _ = run(["brandt", "--ramified", "11", "--prime", "2"], capsys)
    data = json.loads(out)
    assert data["matrix"] == [[1, 3], [2, 0]]
    assert data["eigenvalues"] == {"-2": 1, "3": 1}


def test_brandt_rejects_even_ramification(capsys):
    code, _, err = run(["brandt", "--ramified", "2", "3", "--prime", "5"], capsys)
    assert code == 2 and "odd" in err


def test_local_grid_command(capsys):
    code, out, _ = run(["local", "--grid"], capsys)
    rows = json.loads(out)
    assert code == 0 and len(rows) == 49 and all(r["equal"] for r in rows)
    code, out, _ = run(["local", "--grid", "--format", "text"], capsys)
    assert out.splitlines()[0].startswith("kv")


def test_verify_inapplicable_exit_code(capsys):
    code, out, _ = run(["verify", "--level", "11", "--disc", "-7", "--deterministic"], capsys)
    assert code == 2
    assert "error" in json.loads(out)


def test_verify_bad_discriminant(capsys):
    code, _, err = run(["verify", "--level", "11", "--disc", "-12"], capsys)
    assert code == 2 and "fundamental" in err


def test_verify_passes_and_is_deterministic(tmp_path, capsys):
    args = ["verify", "--level", "11", "--disc", "-4", "--deterministic", "--cache-dir", str(tmp_path / "c")]
    code1, out1, _ = run(args, capsys)
    code2, out2, _ = run(args, capsys)
    assert code1 == code2 == 0
    assert out1 == out2
    rep = json.loads(out1)
    assert rep["passed"] and rep["runtime_ms"] is None and rep["cache"] is None
    assert rep["relative_error"] < 1e-20


def test_degree4_flag_is_unsupported(capsys):
    code, _, _ = run(["verify", "--level", "11", "--disc", "-4", "--cond", "3", "--char", "1", "--degree4-afe"], capsys)
    assert code == 2


def test_config_file_and_override(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"command": "verify", "level": 11, "disc": -4, "tolerance": 1e-3}))
    cfg = load_config(str(path), {"tolerance": 1e-6, "level": None})
    assert cfg.level == 11 and cfg.tolerance == 1e-6
    path.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(DomainError):
        load_config(str(path), {})
    with pytest.raises(DomainError):
        RunConfig(command="verify", level=11, disc=-4, precision_bits=32).validate()


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = run(["classset", "--ramified", "13", "-o", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["n"] == 1


def test_cache_round_trip(tmp_path):
    order = maximal_order(algebra_from_ramification([23]))
    cs = class_set(order)
    cs.hecke_matrix(5)
    cache = ClassSetCache(tmp_path)
    path = cache.store(cs)
    entry = json.loads(path.read_text())
    assert entry["schema"] == SCHEMA
    loaded = cache.load(order)
    assert loaded is not None
    assert loaded.weights == cs.weights and loaded.norms == cs.norms
    assert loaded.hecke_matrix(5) == cs.hecke_matrix(5)
    assert loaded.hecke_matrix(7) == cs.hecke_matrix(7)


def test_cache_rejects_tampered_file(tmp_path):
    order = maximal_order(algebra_from_ramification([11]))
    cache = ClassSetCache(tmp_path)
    path = cache.store(class_set(order))
    entry = json.loads(path.read_text())
    entry["payload"]["weights"] = [1, 1]
    path.write_text(json.dumps(entry))
    assert cache.load(order) is None
    again = cache.class_set(order)
    assert again.weights == (2, 3) and cache.stats() == {"hits": 0, "misses": 1}
    cache.class_set(order)
    assert cache.stats()["hits"] == 1


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "toric_periods.cli", "classset", "--ramified", "2"], capture_output=True, text=True
    )
    assert res.returncode == 0 and json.loads(res.stdout)["n"] == 1
