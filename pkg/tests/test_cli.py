import hashlib
import json
import os

import pytest

from hmfkernel.cli import main
from hmfkernel.qexp import deserialize

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


def cfg(name):
    return os.path.abspath(os.path.join(CONFIGS, name))


def run(tmp_path, *argv):
    return main(list(argv) + ["--out", str(tmp_path)])


def read(tmp_path, name):
    with open(os.path.join(tmp_path, name)) as fh:
        return fh.read()


def write_config(tmp_path, obj, name="c.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_primes_table_and_manifest(tmp_path):
    assert run(tmp_path, "primes", "--config", cfg("q5.json"), "--bound", "20") == 0
    lines = read(tmp_path, "primes.tsv").splitlines()
    assert lines[0] == "# hmfkernel-report 1"
    assert lines[2] == "label\tp\tnorm\te\tf"
    assert [l.split("\t")[0] for l in lines[3:]] == ["4", "5", "9", "11a", "11b", "19a", "19b"]
    m = json.loads(read(tmp_path, "primes.manifest.json"))
    with open(cfg("q5.json"), "rb") as fh:
        assert m["config_sha256"] == hashlib.sha256(fh.read()).hexdigest()
    assert m["status"] == "ok" and m["files"][0]["name"] == "primes.tsv"
    assert m["files"][0]["sha256"] == hashlib.sha256(read(tmp_path, "primes.tsv").encode()).hexdigest()


def test_theta_then_hecke(tmp_path):
    assert run(tmp_path, "theta", "--config", cfg("s7.json"), "--bound", "60") == 0
    th = deserialize(read(tmp_path, "theta.qexp"))
    F = th.field
    assert th[F.int_ideal(11)] == 2 and not th.has_a0
    assert run(tmp_path, "hecke", "--config", cfg("s7.json"), "--input", str(tmp_path / "theta.qexp"),
               "--ideal", "2") == 0
    t2 = deserialize(read(tmp_path, "hecke.qexp"))
    assert t2.bound == 30
    # theta of the trivial character is an eigenform at 2 with eigenvalue a(2) = 2
    assert [t2[F.int_ideal(n)] for n in range(1, 31)] == [2 * th[F.int_ideal(n)] for n in range(1, 31)]


def test_eisenstein_and_product(tmp_path):
    assert run(tmp_path, "eis", "--config", cfg("eis7.json"), "--bound", "30") == 0
    eis = deserialize(read(tmp_path, "eis.qexp"))
    assert eis.a0 == 1       # L(0, chi_-7) with the Euler factor at 3 removed, halved
    path = str(tmp_path / "eis.qexp")
    assert run(tmp_path, "mul", "--config", cfg("eis7.json"), "--input", path, "--input2", path) == 0
    sq = deserialize(read(tmp_path, "mul.qexp"))
    assert sq.a0 == 1 and sq[sq.field.int_ideal(1)] == 2 * eis[eis.field.int_ideal(1)]


def test_product_with_omitted_constant_is_a_precondition_failure(tmp_path):
    assert run(tmp_path, "theta", "--config", cfg("s7.json"), "--bound", "20") == 0
    path = str(tmp_path / "theta.qexp")
    assert run(tmp_path, "mul", "--config", cfg("s7.json"), "--input", path, "--input2", path) == 3
    assert json.loads(read(tmp_path, "mul.manifest.json"))["status"] == "precondition-violated"


def test_stabilize_and_eord(tmp_path):
    # sigma_1 at level one: a(3) = 4, roots 1 and 3
    base = {"format": 1, "field": {"field": "Q"}, "weight": 2, "character": {"type": "trivial"},
            "constant_term": "omitted", "p": 3, "bounds": {"ideal_norm": 200}}
    c = write_config(tmp_path, dict(base, precision=2))
    assert main(["eis", "--config", c, "--out", str(tmp_path)]) == 0
    path = str(tmp_path / "eis.qexp")
    assert main(["stabilize", "--config", c, "--out", str(tmp_path), "--input", path]) == 0
    g = deserialize(read(tmp_path, "stabilize-alpha.qexp"))
    F = g.field
    assert g.tag() == "padic" and g.level == F.int_ideal(3)
    assert all(g[F.int_ideal(3 * n)] == g[F.int_ideal(n)] for n in range(1, 60))
    assert main(["eord", "--config", c, "--out", str(tmp_path), "--input", path, "--iterations", "2",
                 "--direction", "beta"]) == 0
    rows = [r.split("\t") for r in read(tmp_path, "eord.tsv").splitlines()[3:]]
    assert [r[4] for r in rows] == ["False", "True"]
    # an eigenvalue table overrides the coefficient read from the input
    c2 = write_config(tmp_path, dict(base, precision=2, eigenvalues={"3": 2}), "c2.json")
    assert main(["stabilize", "--config", c2, "--out", str(tmp_path), "--input", path]) == 0
    h = deserialize(read(tmp_path, "stabilize-alpha.qexp"))
    assert h[F.int_ideal(3)] != g[F.int_ideal(3)]


def test_stabilize_refuses_weight_one(tmp_path):
    c = write_config(tmp_path, {"format": 1, "cm": {"delta": -7}, "p": 11, "bounds": {"ideal_norm": 50}})
    assert main(["theta", "--config", c, "--out", str(tmp_path)]) == 0
    assert main(["stabilize", "--config", c, "--out", str(tmp_path), "--input", str(tmp_path / "theta.qexp")]) == 3


def test_kernel_commands(tmp_path):
    args = ["--config", cfg("s7.json"), "--bound", "200"]
    assert run(tmp_path, "kernel-analytic", *args) == 0
    assert run(tmp_path, "kernel-geometric", *args) == 0
    a = read(tmp_path, "kernel-analytic.tsv").splitlines()[3:]
    g = read(tmp_path, "kernel-geometric.tsv").splitlines()[3:]
    assert a == g and a[0] == "23\t7\t4"
    assert run(tmp_path, "kernel-compare", *args) == 0
    assert "all_equal=True" in read(tmp_path, "kernel-compare.tsv")
    assert run(tmp_path, "kernel-geometric", *args, "--no-require-p-divisible") == 3
    assert run(tmp_path, "kernel-analytic", *args, "--no-require-p-divisible", "--ideal-norm-max", "20") == 0
    rows = read(tmp_path, "kernel-analytic.tsv").splitlines()[3:]
    assert len(rows) == 20
    assert run(tmp_path, "product-check", *args) == 0


def test_kernel_compare_over_q5_exits_with_comparison_failure(tmp_path):
    assert run(tmp_path, "kernel-compare", "--config", cfg("q5.json"), "--bound", "50") == 4
    assert "all_equal=False" in read(tmp_path, "kernel-compare.tsv")
    assert json.loads(read(tmp_path, "kernel-compare.manifest.json"))["status"] == "comparison-failure"


def test_tree_normrel(tmp_path):
    assert run(tmp_path, "tree-normrel", "--q", "3", "--k", "1", "--dump") == 0
    text = read(tmp_path, "tree-normrel-q3-k1.txt")
    assert "equal True" in text and "size 18" in text and text.startswith("# hmfkernel-report 1")


@pytest.mark.parametrize("conf,problem", [
    ('{"format": 2}', "unsupported config format"),
    ('{"bounds": {"ideal_norm": -1}}', "positive integer"),
    ('{"extra": 1}', "unknown key"),
    ('not json', "not valid JSON"),
    ('{"cm": {"delta": -7}, "level": "3", "p": 23}', "does not split"),
    ('{"cm": {"delta": -7}, "level": "11", "p": 3}', "split"),
])
def test_invalid_configs(tmp_path, capsys, conf, problem):
    c = write_config(tmp_path, conf)
    cmd = "kernel-compare" if "level" in conf else "primes"
    assert main([cmd, "--config", c, "--out", str(tmp_path)]) == 2
    assert problem in capsys.readouterr().err


def test_missing_input_is_an_io_error(tmp_path):
    assert run(tmp_path, "hecke", "--config", cfg("s7.json"), "--input", str(tmp_path / "none.qexp"),
               "--ideal", "2") == 5


def test_missing_config_is_an_io_error(tmp_path):
    assert run(tmp_path, "primes", "--config", str(tmp_path / "none.json")) == 5
